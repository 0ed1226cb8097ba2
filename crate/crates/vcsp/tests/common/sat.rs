// Brute-force one-in-three satisfiability: some assignment makes exactly
// one literal occurrence true in every clause.  Repeated variables count
// once per occurrence.

pub fn one_in_three_satisfiable(variables: usize, clauses: &[[usize; 3]]) -> bool {
    assert!(variables < 26, "assignments are enumerated as bitmasks");
    (0u32..(1 << variables)).any(|mask| {
        clauses
            .iter()
            .all(|c| c.iter().filter(|&&v| mask >> v & 1 == 1).count() == 1)
    })
}
