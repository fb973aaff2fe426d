//! Payoff evaluation, normal forms, equilibrium and certificate checks.

pub mod best_response;
pub mod budget;
pub mod elimination;
pub mod guarantee;
pub mod lemma;
pub mod martingale;
pub mod montecarlo;
pub mod nash;
pub mod normal_form;
pub mod payoff;

pub use best_response::{best_response_value, coalition_value, Info, Objective};
pub use budget::{budget_balance_check, BudgetVerdict};
pub use elimination::{eliminate, verify_trace, EliminationTrace, Mode, Order};
pub use guarantee::{coalition_check, guarantee_certificate, verify_guarantee, GuaranteeCertificate};
pub use lemma::{delta_trace, lemma_general_check, lemma_parity_check, DeltaTrace, LemmaCheck, Pair};
pub use martingale::{verify_martingale, MartingaleReport};
pub use montecarlo::{monte_carlo, MonteCarlo};
pub use nash::{nash_check, NashVerdict};
pub use normal_form::{induced_normal_form, NormalForm};
pub use payoff::{expectation, expected_payoffs, Expectation, Measure, PayoffVector};
