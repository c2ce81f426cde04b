//! 3-CNF formulas and DIMACS parsing.

use std::fmt;

use thiserror::Error;

use super::GenError;

/// One literal of a 3-SAT clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lit {
    /// 1-based variable index.
    pub var: u32,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: u32) -> Lit {
        Lit { var, positive: true }
    }

    pub fn neg(var: u32) -> Lit {
        Lit { var, positive: false }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "-{}", self.var)
        }
    }
}

/// A 3-CNF formula: exactly three literals per clause, variables in `[1, n]`.
/// Clauses may repeat a variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<[Lit; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<[Lit; 3]>) -> Result<CnfFormula, CnfError> {
        for (ci, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var < 1 || lit.var > num_vars {
                    return Err(CnfError::VariableOutOfRange {
                        clause: ci + 1,
                        var: lit.var,
                        num_vars,
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Evaluates the formula under a total assignment (`assignment[i]` is the
    /// value of variable `i+1`).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause
                .iter()
                .any(|lit| assignment[(lit.var - 1) as usize] == lit.positive)
        })
    }

    /// First satisfying assignment in binary counting order, by exhaustive
    /// enumeration. Guarded to small variable counts.
    pub fn exhaustive_satisfying_assignment(&self) -> Result<Option<Vec<bool>>, GenError> {
        if self.num_vars > 20 {
            return Err(GenError::FormulaTooLarge(self.num_vars));
        }
        let n = self.num_vars as usize;
        for bits in 0u32..(1 << n) {
            let assignment: Vec<bool> = (0..n).map(|i| bits & (1 << i) != 0).collect();
            if self.eval(&assignment) {
                return Ok(Some(assignment));
            }
        }
        Ok(None)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: expected `p cnf <vars> <clauses>` header, found `{found}`")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: clause before header")]
    ClauseBeforeHeader { line: usize },
    #[error("line {line}: bad literal token `{token}`")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: clause has {count} literals, 3-SAT requires exactly 3")]
    NotThreeLiterals { line: usize, count: usize },
    #[error("line {line}: clause not terminated by 0")]
    MissingTerminator { line: usize },
    #[error("clause {clause}: variable {var} out of range [1, {num_vars}]")]
    VariableOutOfRange { clause: usize, var: u32, num_vars: u32 },
    #[error("header promises {expected} clauses, found {found}")]
    ClauseCountMismatch { expected: usize, found: usize },
}

/// Parses standard DIMACS CNF (`p cnf n m` header, clause lines terminated by
/// 0, `c` comments). Every clause must carry exactly three literals.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses: Vec<[Lit; 3]> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let parsed = (parts.len() == 3 && parts[0] == "cnf")
                .then(|| {
                    let vars = parts[1].parse::<u32>().ok()?;
                    let count = parts[2].parse::<usize>().ok()?;
                    Some((vars, count))
                })
                .flatten();
            match parsed {
                Some(h) => header = Some(h),
                None => {
                    return Err(CnfError::BadHeader {
                        line: line_no,
                        found: line.to_string(),
                    })
                }
            }
            continue;
        }
        if header.is_none() {
            return Err(CnfError::ClauseBeforeHeader { line: line_no });
        }
        let mut lits = Vec::new();
        let mut terminated = false;
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| CnfError::BadLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                terminated = true;
                break;
            }
            lits.push(Lit {
                var: value.unsigned_abs() as u32,
                positive: value > 0,
            });
        }
        if !terminated {
            return Err(CnfError::MissingTerminator { line: line_no });
        }
        if lits.len() != 3 {
            return Err(CnfError::NotThreeLiterals {
                line: line_no,
                count: lits.len(),
            });
        }
        clauses.push([lits[0], lits[1], lits[2]]);
    }
    let (num_vars, expected) = header.unwrap_or((0, 0));
    if clauses.len() != expected {
        return Err(CnfError::ClauseCountMismatch {
            expected,
            found: clauses.len(),
        });
    }
    CnfFormula::new(num_vars, clauses)
}

pub fn write_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars, formula.num_clauses());
    for clause in &formula.clauses {
        out.push_str(&format!("{} {} {} 0\n", clause[0], clause[1], clause[2]));
    }
    out
}
