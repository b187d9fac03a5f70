use kgsens::jobs::enumerate_jobs;

const TRAINING: [&str; 3] = ["negative_sampling", "1vsAll", "KvsAll"];
const LOSSES: [&str; 3] = ["bce", "kl", "margin_ranking"];

#[test]
fn transe_has_two_valid_jobs() {
    let jobs = enumerate_jobs(&["umls"], &["TransE"], &TRAINING, &LOSSES).unwrap();
    assert_eq!(jobs.len(), 9);
    let valid: Vec<String> = jobs.iter().filter(|j| j.valid).map(|j| j.id()).collect();
    assert_eq!(valid, ["umls:transe:negative_sampling:bce", "umls:transe:negative_sampling:margin_ranking"]);
}

#[test]
fn distmult_has_seven_valid_jobs() {
    let jobs = enumerate_jobs(&["umls"], &["distmult"], &TRAINING, &LOSSES).unwrap();
    assert_eq!(jobs.iter().filter(|j| j.valid).count(), 7);
    for j in jobs.iter().filter(|j| !j.valid) {
        assert_eq!(j.loss.name(), "margin_ranking");
        assert!(j.invalid_reason.is_some());
    }
}

#[test]
fn empty_lists_are_rejected() {
    assert!(enumerate_jobs(&["umls"], &[], &TRAINING, &LOSSES).is_err());
    assert!(enumerate_jobs(&[], &["distmult"], &TRAINING, &LOSSES).is_err());
}

#[test]
fn validity_depends_only_on_names() {
    let a = enumerate_jobs(&["x", "y"], &["complex", "rescal"], &TRAINING, &LOSSES).unwrap();
    for pair in a.chunks(18).collect::<Vec<_>>().windows(2) {
        let va: Vec<bool> = pair[0].iter().map(|j| j.valid).collect();
        let vb: Vec<bool> = pair[1].iter().map(|j| j.valid).collect();
        assert_eq!(va, vb);
    }
}
