use serde::{Deserialize, Serialize};

/// Resource caps for the exhaustive parts of the toolkit.
///
/// Every cap is checked before work starts whenever the cost is predictable
/// (assignment counts, table sizes) and during the search otherwise
/// (backtracking nodes).  Exceeding a cap is reported as
/// [`Error::BudgetExceeded`](crate::Error::BudgetExceeded), never as a wrong
/// answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum number of assignments an exhaustive solve may enumerate.
    pub assignments: u64,
    /// Maximum number of operations kept in a single operation set.
    pub ops: u64,
    /// Maximum number of rows (and columns) in a generated linear system.
    pub lp_rows: u64,
    /// Maximum number of nodes a backtracking search may visit.
    pub nodes: u64,
    /// Maximum operation table size (`domain_size^arity` cells) for
    /// polymorphism enumeration.
    pub table_cells: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            assignments: 1 << 24,
            ops: 1 << 20,
            lp_rows: 100_000,
            nodes: 10_000_000,
            table_cells: 27,
        }
    }
}

impl Budget {
    /// Checks `needed <= allowed`, reporting `what` on failure.
    pub fn check(what: &'static str, needed: u128, allowed: u64) -> Result<(), crate::Error> {
        if needed > allowed as u128 {
            Err(crate::Error::BudgetExceeded {
                what,
                needed,
                allowed: allowed as u128,
            })
        } else {
            Ok(())
        }
    }
}
