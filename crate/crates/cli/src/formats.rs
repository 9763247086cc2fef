//! JSON file formats for games and quantum strategies.
//!
//! Game files carry `n_s, n_t, n_a, n_b`, an `n_s × n_t` `input_dist` and an
//! `n_s × n_t × n_a × n_b` `cost` array whose entries are numbers or the
//! string `"inf"`. Strategy files carry `d_a, d_b`, the state as `[re, im]`
//! pairs and one list of `[re, im]` matrices per input per party.

use std::fs;
use std::path::Path;

use ngcost_core::linalg::{CMatrix, CVector, C64};
use ngcost_core::{Game, GameParts, QuantumStrategy};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CostEntry {
    Number(f64),
    Text(String),
}

impl CostEntry {
    fn from_value(v: f64) -> Self {
        if v == f64::INFINITY {
            CostEntry::Text("inf".into())
        } else {
            CostEntry::Number(v)
        }
    }

    fn to_value(&self) -> Result<f64, CliError> {
        match self {
            CostEntry::Number(x) => Ok(*x),
            CostEntry::Text(s) if s == "inf" => Ok(f64::INFINITY),
            CostEntry::Text(s) => Err(CliError::Validation(format!(
                "cost entry {s:?} is neither a number nor \"inf\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub n_s: usize,
    pub n_t: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub input_dist: Vec<Vec<f64>>,
    pub cost: Vec<Vec<Vec<Vec<CostEntry>>>>,
}

fn shape_error(what: &str, at: &str, expected: usize, found: usize) -> CliError {
    CliError::Validation(format!(
        "shape mismatch: {what}{at} has length {found}, expected {expected}"
    ))
}

impl GameFile {
    pub fn from_game(g: &Game) -> Self {
        let input_dist = (0..g.n_s())
            .map(|s| (0..g.n_t()).map(|t| g.prob(s, t)).collect())
            .collect();
        let cost = (0..g.n_s())
            .map(|s| {
                (0..g.n_t())
                    .map(|t| {
                        (0..g.n_a())
                            .map(|a| {
                                (0..g.n_b())
                                    .map(|b| CostEntry::from_value(g.cost(s, t, a, b).value()))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        GameFile {
            n_s: g.n_s(),
            n_t: g.n_t(),
            n_a: g.n_a(),
            n_b: g.n_b(),
            input_dist,
            cost,
        }
    }

    /// Checks nesting shapes, then the game invariants.
    pub fn to_game(&self) -> Result<Game, CliError> {
        if self.input_dist.len() != self.n_s {
            return Err(shape_error("input_dist", "", self.n_s, self.input_dist.len()));
        }
        let mut dist = Vec::with_capacity(self.n_s * self.n_t);
        for (s, row) in self.input_dist.iter().enumerate() {
            if row.len() != self.n_t {
                return Err(shape_error("input_dist", &format!("[{s}]"), self.n_t, row.len()));
            }
            dist.extend_from_slice(row);
        }
        if self.cost.len() != self.n_s {
            return Err(shape_error("cost", "", self.n_s, self.cost.len()));
        }
        let mut cost = Vec::with_capacity(self.n_s * self.n_t * self.n_a * self.n_b);
        for (s, by_t) in self.cost.iter().enumerate() {
            if by_t.len() != self.n_t {
                return Err(shape_error("cost", &format!("[{s}]"), self.n_t, by_t.len()));
            }
            for (t, by_a) in by_t.iter().enumerate() {
                if by_a.len() != self.n_a {
                    return Err(shape_error("cost", &format!("[{s}][{t}]"), self.n_a, by_a.len()));
                }
                for (a, by_b) in by_a.iter().enumerate() {
                    if by_b.len() != self.n_b {
                        return Err(shape_error(
                            "cost",
                            &format!("[{s}][{t}][{a}]"),
                            self.n_b,
                            by_b.len(),
                        ));
                    }
                    for e in by_b {
                        cost.push(e.to_value()?);
                    }
                }
            }
        }
        let parts = GameParts {
            n_s: self.n_s,
            n_t: self.n_t,
            n_a: self.n_a,
            n_b: self.n_b,
            input_dist: dist,
            cost,
        };
        Game::try_from(parts).map_err(CliError::from)
    }
}

pub fn parse_game(json: &str) -> Result<Game, CliError> {
    let file: GameFile = serde_json::from_str(json)
        .map_err(|e| CliError::Validation(format!("malformed game file: {e}")))?;
    file.to_game()
}

pub fn game_to_json(g: &Game) -> String {
    serde_json::to_string_pretty(&GameFile::from_game(g)).expect("game serializes")
}

pub fn read_game(path: &Path) -> Result<Game, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse_game(&text)
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub d_a: usize,
    pub d_b: usize,
    pub state: Vec<[f64; 2]>,
    pub alice_povms: Vec<Vec<JsonMatrix>>,
    pub bob_povms: Vec<Vec<JsonMatrix>>,
}

fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_json(m: &JsonMatrix, dim: usize) -> Result<CMatrix, CliError> {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        return Err(CliError::Validation(format!(
            "shape mismatch: POVM element is not {dim}x{dim}"
        )));
    }
    let data = m.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    CMatrix::from_vec(dim, dim, data).map_err(CliError::from)
}

impl StrategyFile {
    pub fn from_strategy(qs: &QuantumStrategy) -> Self {
        let povms = |set: &Vec<Vec<CMatrix>>| -> Vec<Vec<JsonMatrix>> {
            set.iter().map(|p| p.iter().map(matrix_to_json).collect()).collect()
        };
        StrategyFile {
            d_a: qs.d_a(),
            d_b: qs.d_b(),
            state: qs.state().as_slice().iter().map(|z| [z.re, z.im]).collect(),
            alice_povms: povms(qs.alice_povms()),
            bob_povms: povms(qs.bob_povms()),
        }
    }

    pub fn to_strategy(&self) -> Result<QuantumStrategy, CliError> {
        let convert = |set: &Vec<Vec<JsonMatrix>>, dim: usize| -> Result<Vec<Vec<CMatrix>>, CliError> {
            set.iter()
                .map(|p| p.iter().map(|m| matrix_from_json(m, dim)).collect())
                .collect()
        };
        let state = CVector::new(self.state.iter().map(|&[re, im]| C64::new(re, im)).collect());
        QuantumStrategy::new(
            self.d_a,
            self.d_b,
            state,
            convert(&self.alice_povms, self.d_a)?,
            convert(&self.bob_povms, self.d_b)?,
        )
        .map_err(CliError::from)
    }
}

pub fn parse_strategy(json: &str) -> Result<QuantumStrategy, CliError> {
    let file: StrategyFile = serde_json::from_str(json)
        .map_err(|e| CliError::Validation(format!("malformed strategy file: {e}")))?;
    file.to_strategy()
}

pub fn strategy_to_json(qs: &QuantumStrategy) -> String {
    serde_json::to_string_pretty(&StrategyFile::from_strategy(qs)).expect("strategy serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ngcost_core::{chsh_optimal_strategy, hardy_strategy, make_chsh_game, make_hardy_game};

    #[test]
    fn hardy_file_uses_inf_strings() {
        let json = game_to_json(&make_hardy_game(1.0).unwrap());
        assert_eq!(json.matches("\"inf\"").count(), 3);
        let back = parse_game(&json).unwrap();
        assert_eq!(back, make_hardy_game(1.0).unwrap());
    }

    #[test]
    fn rejects_unknown_fields() {
        let mut v: serde_json::Value = serde_json::from_str(&game_to_json(&make_chsh_game())).unwrap();
        v["extra"] = serde_json::json!(1);
        let err = parse_game(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn rejects_shape_mismatches() {
        let mut file = GameFile::from_game(&make_chsh_game());
        file.cost[1][0].pop();
        assert!(file.to_game().unwrap_err().to_string().contains("cost[1][0]"));

        let mut file = GameFile::from_game(&make_chsh_game());
        file.input_dist[0].push(0.0);
        assert!(file.to_game().unwrap_err().to_string().contains("input_dist[0]"));

        let mut file = GameFile::from_game(&make_chsh_game());
        file.n_b = 3;
        assert!(file.to_game().is_err());
    }

    #[test]
    fn rejects_bad_text_and_bad_distribution() {
        let mut file = GameFile::from_game(&make_chsh_game());
        file.cost[0][0][0][0] = CostEntry::Text("-inf".into());
        assert!(file.to_game().is_err());

        let mut file = GameFile::from_game(&make_chsh_game());
        file.input_dist[1][1] = 0.15;
        let err = file.to_game().unwrap_err().to_string();
        assert!(err.contains("distribution not normalized"), "{err}");
    }

    #[test]
    fn strategy_round_trip() {
        for qs in [chsh_optimal_strategy(), hardy_strategy(0.4).unwrap()] {
            let back = parse_strategy(&strategy_to_json(&qs)).unwrap();
            assert_eq!(back, qs);
        }
    }

    #[test]
    fn strategy_validation_errors() {
        let mut file = StrategyFile::from_strategy(&chsh_optimal_strategy());
        file.state[0] = [1.0, 0.0];
        assert!(file.to_strategy().is_err());
        let mut file = StrategyFile::from_strategy(&chsh_optimal_strategy());
        file.alice_povms[0][0].pop();
        assert!(file.to_strategy().is_err());
    }
}
