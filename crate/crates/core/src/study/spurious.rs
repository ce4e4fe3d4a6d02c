/// Flags computed values with no reference within `rel_tol` (relative to the reference).
///
/// Values are matched in ascending order against the sorted references, each
/// reference at most once. The result is indexed like `computed`.
pub fn detect_spurious(computed: &[f64], references: &[f64], rel_tol: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..computed.len()).collect();
    order.sort_by(|&a, &b| computed[a].total_cmp(&computed[b]));
    let mut refs = references.to_vec();
    refs.sort_by(f64::total_cmp);

    let mut flags = vec![false; computed.len()];
    let mut next = 0;
    for &i in &order {
        let c = computed[i];
        // references far below the current value were missed
        while next < refs.len() && refs[next] * (1.0 + rel_tol) < c {
            next += 1;
        }
        if next < refs.len() && (c - refs[next]).abs() <= rel_tol * refs[next].abs() {
            next += 1;
        } else {
            flags[i] = true;
        }
    }
    flags
}
