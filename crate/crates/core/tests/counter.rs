//! Lifecycle of the process-wide entropy-evaluation counter. Kept in its
//! own test binary so no other test touches the counter concurrently.

use ditraffic_core::{
    di_matrix, entropy_eval_count, entropy_evaluations, reset_entropy_evaluations, ActivityTrace,
    EventDataset,
};

#[test]
fn counter_starts_at_zero_and_tracks_scans_exactly() {
    assert_eq!(entropy_evaluations(), 0);

    let ds = EventDataset::new(
        vec![
            ActivityTrace::new("a", vec![vec![0, 0]]),
            ActivityTrace::new("b", vec![vec![0, 0]]),
        ],
        2,
        1,
    );
    di_matrix(&ds, &"a".into(), &"b".into()).unwrap();
    assert_eq!(entropy_evaluations(), 5);

    // The isolated measurement probe must not disturb the global count.
    assert_eq!(entropy_eval_count(12).unwrap(), 330);
    assert_eq!(entropy_evaluations(), 5);

    di_matrix(&ds, &"b".into(), &"a".into()).unwrap();
    assert_eq!(entropy_evaluations(), 10);

    reset_entropy_evaluations();
    assert_eq!(entropy_evaluations(), 0);
}
