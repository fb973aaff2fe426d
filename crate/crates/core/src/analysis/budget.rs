//! Budget balance of transfer ledgers.

use num_traits::Zero;

use crate::mechanism::TransferLedger;
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetVerdict {
    /// Sum of all agents' net transfers in each round.
    pub per_round: Vec<Rat>,
    pub total: Rat,
    /// Money paid in from outside.
    pub subsidy: Rat,
}

impl BudgetVerdict {
    pub fn is_balanced(&self) -> bool {
        self.per_round.iter().all(Zero::is_zero)
    }
}

pub fn budget_balance_check(ledger: &TransferLedger) -> BudgetVerdict {
    let per_round: Vec<Rat> = ledger.rounds.iter().map(|r| r.net.iter().sum()).collect();
    BudgetVerdict { total: per_round.iter().sum(), per_round, subsidy: ledger.subsidy() }
}
