//! Exact classical cost by enumeration of deterministic strategies.
//!
//! Shared randomness never helps a cost-minimizing pair of players: every
//! randomized strategy is a mixture of deterministic ones, so the minimum is
//! attained by a pair of answer functions `α: S → A`, `β: T → B`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, ExtCost, Game};

/// Refuse to enumerate more than this many strategies.
pub const MAX_STRATEGIES: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeterministicStrategy {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

impl DeterministicStrategy {
    pub fn new(alpha: Vec<usize>, beta: Vec<usize>) -> Self {
        DeterministicStrategy { alpha, beta }
    }

    /// Both players always answer `answer`.
    pub fn constant(g: &Game, answer: usize) -> Self {
        DeterministicStrategy {
            alpha: vec![answer; g.n_s()],
            beta: vec![answer; g.n_t()],
        }
    }

    fn check(&self, g: &Game) -> Result<(), Error> {
        if self.alpha.len() != g.n_s() || self.beta.len() != g.n_t() {
            return Err(Error::ShapeMismatch(format!(
                "strategy tables have lengths ({}, {}), game has {} x {} inputs",
                self.alpha.len(),
                self.beta.len(),
                g.n_s(),
                g.n_t()
            )));
        }
        if self.alpha.iter().any(|&a| a >= g.n_a()) || self.beta.iter().any(|&b| b >= g.n_b()) {
            return Err(Error::ShapeMismatch("strategy answer out of range".into()));
        }
        Ok(())
    }
}

/// `Σ π(s,t) · C(α(s), β(t) | s,t)`.
pub fn strategy_cost(g: &Game, st: &DeterministicStrategy) -> Result<ExtCost, Error> {
    st.check(g)?;
    Ok(cost_unchecked(g, &st.alpha, &st.beta))
}

fn cost_unchecked(g: &Game, alpha: &[usize], beta: &[usize]) -> ExtCost {
    let mut total = ExtCost::ZERO;
    for (s, &a) in alpha.iter().enumerate() {
        for (t, &b) in beta.iter().enumerate() {
            total += g.cost(s, t, a, b).weighted(g.prob(s, t));
        }
    }
    total
}

/// Advances `digits` as a base-`radix` counter, most significant digit
/// first. Returns false on wrap-around.
fn next_lex(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn strategy_count(g: &Game) -> u128 {
    let pow = |base: usize, exp: usize| -> u128 {
        (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base as u128))
    };
    pow(g.n_a(), g.n_s()).saturating_mul(pow(g.n_b(), g.n_t()))
}

/// Minimum cost over all deterministic strategies, with the
/// lexicographically first optimal `(α, β)` as witness.
pub fn classical_cost(g: &Game) -> Result<(ExtCost, DeterministicStrategy), Error> {
    let count = strategy_count(g);
    if count > MAX_STRATEGIES {
        return Err(Error::TooManyStrategies {
            count,
            limit: MAX_STRATEGIES,
        });
    }

    let mut alpha = vec![0; g.n_s()];
    let mut beta = vec![0; g.n_t()];
    // Strict improvement only, so the first optimum in lex order is kept.
    let mut best = cost_unchecked(g, &alpha, &beta);
    let mut witness = DeterministicStrategy::new(alpha.clone(), beta.clone());
    loop {
        loop {
            let cost = cost_unchecked(g, &alpha, &beta);
            if cost < best {
                best = cost;
                witness = DeterministicStrategy::new(alpha.clone(), beta.clone());
            }
            if !next_lex(&mut beta, g.n_b()) {
                break;
            }
        }
        if !next_lex(&mut alpha, g.n_a()) {
            break;
        }
    }
    Ok((best, witness))
}

/// Every deterministic strategy attaining `classical_cost`, in lex order.
pub fn classical_optima(g: &Game) -> Result<(ExtCost, Vec<DeterministicStrategy>), Error> {
    let (best, _) = classical_cost(g)?;
    let mut alpha = vec![0; g.n_s()];
    let mut beta = vec![0; g.n_t()];
    let mut optima = Vec::new();
    loop {
        loop {
            if cost_unchecked(g, &alpha, &beta) == best {
                optima.push(DeterministicStrategy::new(alpha.clone(), beta.clone()));
            }
            if !next_lex(&mut beta, g.n_b()) {
                break;
            }
        }
        if !next_lex(&mut alpha, g.n_a()) {
            break;
        }
    }
    Ok((best, optima))
}
