//! Games as cost functions over finite input and output alphabets.
//!
//! Cost tables are indexed `C[s][t][a][b]` and stored flat in row-major
//! order. Infinite costs are a first-class value of [`ExtCost`]; they are
//! only replaced by finite numbers when a solver needs it ([`cap_infinities`]).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::Error;

/// Tolerance on `Σ π(s,t) = 1`.
pub const DIST_SUM_TOL: f64 = 1e-12;

/// A cost value: a finite float or positive infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtCost(f64);

impl ExtCost {
    pub const ZERO: ExtCost = ExtCost(0.0);
    pub const INFINITY: ExtCost = ExtCost(f64::INFINITY);

    /// Rejects NaN and negative infinity.
    pub fn new(value: f64) -> Result<Self, Error> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            Err(Error::InvalidCost(value))
        } else {
            Ok(ExtCost(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    #[inline]
    pub fn finite(self) -> Option<f64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0)
        }
    }

    /// `weight · self` with the expectation convention `0 · ∞ = 0`.
    #[inline]
    pub fn weighted(self, weight: f64) -> ExtCost {
        if weight == 0.0 {
            ExtCost::ZERO
        } else {
            ExtCost(weight * self.0)
        }
    }
}

impl Eq for ExtCost {}

impl Ord for ExtCost {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is unrepresentable, so the partial order is total.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for ExtCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl core::ops::Add for ExtCost {
    type Output = ExtCost;
    fn add(self, rhs: ExtCost) -> ExtCost {
        ExtCost(self.0 + rhs.0)
    }
}

impl core::ops::AddAssign for ExtCost {
    fn add_assign(&mut self, rhs: ExtCost) {
        self.0 += rhs.0;
    }
}

impl core::iter::Sum for ExtCost {
    fn sum<I: Iterator<Item = ExtCost>>(iter: I) -> ExtCost {
        iter.fold(ExtCost::ZERO, |acc, c| acc + c)
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

/// One violated game invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum GameIssue {
    EmptyAlphabet { name: &'static str },
    DistributionShape { expected: usize, found: usize },
    InvalidProbability { s: usize, t: usize, value: f64 },
    DistributionNotNormalized { sum: f64 },
    CostShape { expected: usize, found: usize },
    InvalidCostEntry { s: usize, t: usize, a: usize, b: usize, value: f64 },
}

impl fmt::Display for GameIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameIssue::EmptyAlphabet { name } => write!(f, "alphabet size {name} must be at least 1"),
            GameIssue::DistributionShape { expected, found } => write!(
                f,
                "input distribution has {found} entries, expected {expected}"
            ),
            GameIssue::InvalidProbability { s, t, value } => {
                write!(f, "invalid input probability at ({s},{t}): {value}")
            }
            GameIssue::DistributionNotNormalized { sum } => {
                write!(f, "distribution not normalized (sum = {sum})")
            }
            GameIssue::CostShape { expected, found } => {
                write!(f, "cost table has {found} entries, expected {expected}")
            }
            GameIssue::InvalidCostEntry { s, t, a, b, value } => {
                write!(f, "invalid cost entry at ({s},{t},{a},{b}): {value}")
            }
        }
    }
}

/// Raw, unchecked game data. `input_dist` is flat `[s][t]`, `cost` is flat
/// `[s][t][a][b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameParts {
    pub n_s: usize,
    pub n_t: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub input_dist: Vec<f64>,
    pub cost: Vec<f64>,
}

/// Reports every violated invariant of `parts`; empty iff it forms a valid game.
pub fn validate_game(parts: &GameParts) -> Vec<GameIssue> {
    let mut issues = Vec::new();
    for (name, n) in [
        ("n_s", parts.n_s),
        ("n_t", parts.n_t),
        ("n_a", parts.n_a),
        ("n_b", parts.n_b),
    ] {
        if n == 0 {
            issues.push(GameIssue::EmptyAlphabet { name });
        }
    }

    let n_inputs = parts.n_s * parts.n_t;
    if parts.input_dist.len() != n_inputs {
        issues.push(GameIssue::DistributionShape {
            expected: n_inputs,
            found: parts.input_dist.len(),
        });
    } else {
        let mut sum = 0.0;
        for (i, &p) in parts.input_dist.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                issues.push(GameIssue::InvalidProbability {
                    s: i / parts.n_t,
                    t: i % parts.n_t,
                    value: p,
                });
            }
            sum += p;
        }
        if n_inputs > 0 && !((sum - 1.0).abs() <= DIST_SUM_TOL) {
            issues.push(GameIssue::DistributionNotNormalized { sum });
        }
    }

    let n_outputs = parts.n_a * parts.n_b;
    let expected = n_inputs * n_outputs;
    if parts.cost.len() != expected {
        issues.push(GameIssue::CostShape {
            expected,
            found: parts.cost.len(),
        });
    } else {
        for (i, &c) in parts.cost.iter().enumerate() {
            if ExtCost::new(c).is_err() {
                let (st, ab) = (i / n_outputs, i % n_outputs);
                issues.push(GameIssue::InvalidCostEntry {
                    s: st / parts.n_t,
                    t: st % parts.n_t,
                    a: ab / parts.n_b,
                    b: ab % parts.n_b,
                    value: c,
                });
            }
        }
    }
    issues
}

/// A validated two-party non-local game `(C, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    n_s: usize,
    n_t: usize,
    n_a: usize,
    n_b: usize,
    input_dist: Vec<f64>,
    cost: Vec<ExtCost>,
}

impl TryFrom<GameParts> for Game {
    type Error = Error;

    fn try_from(parts: GameParts) -> Result<Self, Error> {
        let issues = validate_game(&parts);
        if !issues.is_empty() {
            return Err(Error::InvalidGame(issues));
        }
        Ok(Game {
            n_s: parts.n_s,
            n_t: parts.n_t,
            n_a: parts.n_a,
            n_b: parts.n_b,
            input_dist: parts.input_dist,
            cost: parts.cost.into_iter().map(ExtCost).collect(),
        })
    }
}

impl Game {
    pub fn new(
        n_s: usize,
        n_t: usize,
        n_a: usize,
        n_b: usize,
        input_dist: Vec<f64>,
        cost: Vec<f64>,
    ) -> Result<Self, Error> {
        Game::try_from(GameParts {
            n_s,
            n_t,
            n_a,
            n_b,
            input_dist,
            cost,
        })
    }

    /// Game with uniform input distribution.
    pub fn uniform(n_s: usize, n_t: usize, n_a: usize, n_b: usize, cost: Vec<f64>) -> Result<Self, Error> {
        let n = n_s * n_t;
        let p = if n == 0 { 0.0 } else { 1.0 / n as f64 };
        Game::new(n_s, n_t, n_a, n_b, vec![p; n], cost)
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }
    pub fn n_t(&self) -> usize {
        self.n_t
    }
    pub fn n_a(&self) -> usize {
        self.n_a
    }
    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// `π(s,t)`.
    #[inline]
    pub fn prob(&self, s: usize, t: usize) -> f64 {
        self.input_dist[s * self.n_t + t]
    }

    /// `C(a,b|s,t)`.
    #[inline]
    pub fn cost(&self, s: usize, t: usize, a: usize, b: usize) -> ExtCost {
        self.cost[self.index(s, t, a, b)]
    }

    #[inline]
    pub fn index(&self, s: usize, t: usize, a: usize, b: usize) -> usize {
        ((s * self.n_t + t) * self.n_a + a) * self.n_b + b
    }

    pub fn input_dist(&self) -> &[f64] {
        &self.input_dist
    }

    pub fn costs(&self) -> &[ExtCost] {
        &self.cost
    }

    pub fn has_infinite_costs(&self) -> bool {
        self.cost.iter().any(|c| c.is_infinite())
    }

    /// Largest finite entry, or `None` when every entry is infinite.
    pub fn max_finite_cost(&self) -> Option<f64> {
        self.cost
            .iter()
            .filter_map(|c| c.finite())
            .fold(None, |m, c| Some(m.map_or(c, |m: f64| m.max(c))))
    }

    pub fn to_parts(&self) -> GameParts {
        GameParts {
            n_s: self.n_s,
            n_t: self.n_t,
            n_a: self.n_a,
            n_b: self.n_b,
            input_dist: self.input_dist.clone(),
            cost: self.cost.iter().map(|c| c.value()).collect(),
        }
    }

    /// Same game with every cost multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Game, Error> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        let mut g = self.clone();
        for c in &mut g.cost {
            c.0 *= factor;
        }
        Ok(g)
    }
}

/// Parameters of the interpolating family `G(φ, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    phi: f64,
    w: f64,
}

impl FamilyParams {
    pub fn new(phi: f64, w: f64) -> Result<Self, Error> {
        if !(0.0..=core::f64::consts::FRAC_PI_2).contains(&phi) {
            return Err(Error::InvalidParameter(format!(
                "phi must lie in [0, pi/2], got {phi}"
            )));
        }
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "w must be a nonnegative real, got {w}"
            )));
        }
        Ok(FamilyParams { phi, w })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn w(&self) -> f64 {
        self.w
    }
}

fn binary_uniform(blocks: [[f64; 4]; 4]) -> Game {
    let cost = blocks.iter().flatten().copied().collect();
    Game::uniform(2, 2, 2, 2, cost).expect("builtin game tables are valid")
}

/// CHSH as a cost game: unit cost whenever `a ⊕ b ≠ s·t`.
pub fn make_chsh_game() -> Game {
    let mut blocks = [[0.0; 4]; 4];
    for s in 0..2 {
        for t in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    if (a ^ b) != (s & t) {
                        blocks[s * 2 + t][a * 2 + b] = 1.0;
                    }
                }
            }
        }
    }
    binary_uniform(blocks)
}

/// Hardy's paradox as a cost game. Input 0 is the unprimed measurement,
/// input 1 the primed one. The three forbidden events cost `∞` and every
/// answer other than `(0,0)` on the unprimed pair costs `t_cost`.
pub fn make_hardy_game(t_cost: f64) -> Result<Game, Error> {
    if !(t_cost > 0.0 && t_cost.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "T must be positive and finite, got {t_cost}"
        )));
    }
    let inf = f64::INFINITY;
    Ok(binary_uniform([
        [0.0, t_cost, t_cost, t_cost],
        [0.0, inf, 0.0, 0.0],
        [0.0, 0.0, inf, 0.0],
        [inf, 0.0, 0.0, 0.0],
    ]))
}

/// The family `G(φ, w)`, with `1/0 = ∞`.
pub fn make_family_game(p: FamilyParams) -> Game {
    let (sin, cos) = libm::sincos(p.phi);
    let w = p.w;
    let inv = 1.0 / w;
    binary_uniform([
        [0.0, cos, cos, sin],
        [0.0, inv, w, 0.0],
        [0.0, w, inv, 0.0],
        [inv, 0.0, 0.0, w],
    ])
}

/// Replaces every infinite cost by `cap`. The cap must exceed every finite
/// entry so optimal strategies are unchanged.
pub fn cap_infinities(g: &Game, cap: f64) -> Result<Game, Error> {
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cap must be positive and finite, got {cap}"
        )));
    }
    if let Some(max) = g.max_finite_cost() {
        if cap <= max {
            return Err(Error::InvalidParameter(format!(
                "cap {cap} must exceed the largest finite cost {max}"
            )));
        }
    }
    let mut out = g.clone();
    for c in &mut out.cost {
        if c.is_infinite() {
            *c = ExtCost(cap);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn assert_tables_close(x: &Game, y: &Game, tol: f64) {
        assert_eq!(x.input_dist(), y.input_dist());
        for (i, (a, b)) in x.costs().iter().zip(y.costs()).enumerate() {
            assert_eq!(a.is_infinite(), b.is_infinite(), "inf mismatch at {i}");
            if let (Some(a), Some(b)) = (a.finite(), b.finite()) {
                assert!((a - b).abs() <= tol, "entry {i}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ext_cost_rejects_nan_and_neg_inf() {
        assert!(ExtCost::new(f64::NAN).is_err());
        assert!(ExtCost::new(f64::NEG_INFINITY).is_err());
        assert!(ExtCost::new(f64::INFINITY).unwrap().is_infinite());
        assert_eq!(ExtCost::new(-3.0).unwrap().value(), -3.0);
        assert_eq!(ExtCost::INFINITY.weighted(0.0), ExtCost::ZERO);
    }

    #[test]
    fn chsh_table_matches() {
        let g = make_chsh_game();
        assert_eq!(g.cost(1, 1, 0, 0).value(), 1.0);
        assert_eq!(g.cost(1, 1, 0, 1).value(), 0.0);
        assert_eq!(g.cost(0, 0, 0, 0).value(), 0.0);
        assert_eq!(g.cost(0, 0, 0, 1).value(), 1.0);
        for s in 0..2 {
            for t in 0..2 {
                assert_eq!(g.prob(s, t), 0.25);
                let total: f64 = (0..4).map(|ab| g.cost(s, t, ab / 2, ab % 2).value()).sum();
                assert_eq!(total, 2.0);
            }
        }
    }

    #[test]
    fn hardy_table_matches() {
        let g = make_hardy_game(1.0).unwrap();
        assert_eq!(g.cost(0, 0, 0, 1).value(), 1.0);
        assert!(g.cost(0, 1, 0, 1).is_infinite());
        assert!(g.cost(1, 0, 1, 0).is_infinite());
        assert!(g.cost(1, 1, 0, 0).is_infinite());
        assert_eq!(g.costs().iter().filter(|c| c.is_infinite()).count(), 3);

        let g2 = make_hardy_game(2.0).unwrap();
        assert_eq!(g2.cost(0, 0, 1, 1).value(), 2.0);
        assert_eq!(g2.cost(1, 1, 1, 1).value(), 0.0);
    }

    #[test]
    fn hardy_rejects_bad_t() {
        for t in [0.0, -1.0, f64::INFINITY, f64::NAN] {
            assert!(make_hardy_game(t).is_err(), "T = {t}");
        }
    }

    #[test]
    fn family_endpoints() {
        let chsh = make_family_game(FamilyParams::new(0.0, 1.0).unwrap());
        assert_eq!(chsh, make_chsh_game());

        let hardy = make_family_game(FamilyParams::new(FRAC_PI_4, 0.0).unwrap());
        assert_tables_close(&hardy, &make_hardy_game(SQRT_2 / 2.0).unwrap(), 1e-15);

        let top = make_family_game(FamilyParams::new(FRAC_PI_2, 1.0).unwrap());
        let block: [f64; 4] = core::array::from_fn(|ab| top.cost(0, 0, ab / 2, ab % 2).value());
        for (x, want) in block.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((x - want).abs() < 1e-15);
        }
    }

    #[test]
    fn family_params_validated() {
        assert!(FamilyParams::new(-0.1, 1.0).is_err());
        assert!(FamilyParams::new(1.6, 1.0).is_err());
        assert!(FamilyParams::new(0.3, -1.0).is_err());
        assert!(FamilyParams::new(0.3, f64::INFINITY).is_err());
        assert!(FamilyParams::new(FRAC_PI_2, 0.0).is_ok());
    }

    #[test]
    fn capping() {
        let g = make_hardy_game(1.0).unwrap();
        let capped = cap_infinities(&g, 10.0).unwrap();
        assert!(!capped.has_infinite_costs());
        assert_eq!(capped.costs().iter().filter(|c| c.value() == 10.0).count(), 3);
        assert_eq!(capped.input_dist(), g.input_dist());

        let chsh = make_chsh_game();
        assert_eq!(cap_infinities(&chsh, 5.0).unwrap(), chsh);

        assert!(cap_infinities(&g, 0.5).is_err());
        assert!(cap_infinities(&g, 1.0).is_err());
        assert!(cap_infinities(&g, f64::INFINITY).is_err());
    }

    #[test]
    fn validation_reports() {
        assert!(validate_game(&make_chsh_game().to_parts()).is_empty());

        let mut parts = make_chsh_game().to_parts();
        parts.input_dist = vec![0.25, 0.25, 0.25, 0.15];
        let issues = validate_game(&parts);
        assert!(matches!(issues[..], [GameIssue::DistributionNotNormalized { .. }]));
        assert!(std::format!("{}", issues[0]).contains("distribution not normalized"));

        let mut parts = make_chsh_game().to_parts();
        parts.cost[7] = f64::NAN;
        let issues = validate_game(&parts);
        assert_eq!(issues.len(), 1);
        assert!(std::format!("{}", issues[0]).starts_with("invalid cost entry at (0,1,1,1)"));

        let parts = GameParts {
            n_s: 0,
            n_t: 2,
            n_a: 2,
            n_b: 2,
            input_dist: vec![],
            cost: vec![],
        };
        assert!(validate_game(&parts)
            .iter()
            .any(|i| matches!(i, GameIssue::EmptyAlphabet { name: "n_s" })));

        let mut parts = make_chsh_game().to_parts();
        parts.cost.pop();
        assert!(matches!(
            validate_game(&parts)[..],
            [GameIssue::CostShape { expected: 16, found: 15 }]
        ));
        assert!(Game::try_from(parts).is_err());
    }
}
