//! Line-oriented description of a homogeneous space.
//!
//! ```text
//! # comments start with '#'
//! name     su2-squashed
//! algebra  su 2 + torus 1      # summands: su n | so n | sp n | torus k
//! algebra  explicit 3          # or raw structure constants, see 'bracket'
//! bracket  0 1 2 1.0           # [e_0, e_1] = 1.0 e_2 (antisymmetry implied)
//! ip       identity            # identity | killing (= -B) | diag x_0 ... x_{n-1}
//! subalgebra 3                 # basis indices spanning h
//! subvector  0 0 1 1           # further vector in h, in coordinates
//! block    0                   # basis indices of one block; repeat per block
//! scales   2 1 1               # metric x_i <,> on block i
//! ```
//!
//! Builder algebras come with the orthonormal basis of `−B` (identity on
//! torus summands). Explicit algebras default to `ip identity`. Without
//! `block` lines every complement basis vector is its own block.

use std::path::Path;

use crate::error::SpaceFileError;

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraSpec {
    Builders(Vec<(String, usize)>),
    Explicit { dim: usize, brackets: Vec<(usize, usize, usize, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum InnerProductSpec {
    Identity,
    Killing,
    Diagonal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceDescription {
    pub name: Option<String>,
    pub algebra: AlgebraSpec,
    pub ip: Option<InnerProductSpec>,
    pub subalgebra: Vec<usize>,
    pub subvectors: Vec<Vec<f64>>,
    pub blocks: Vec<Vec<usize>>,
    pub scales: Option<Vec<f64>>,
}

pub fn read(path: &Path) -> Result<SpaceDescription, SpaceFileError> {
    parse(&std::fs::read_to_string(path)?)
}

fn err(line: usize, message: impl Into<String>) -> SpaceFileError {
    SpaceFileError::Parse {
        line,
        message: message.into(),
    }
}

fn numbers<T: std::str::FromStr>(line: usize, args: &[&str]) -> Result<Vec<T>, SpaceFileError> {
    args.iter()
        .map(|a| a.parse::<T>().map_err(|_| err(line, format!("cannot parse '{a}'"))))
        .collect()
}

pub fn parse(text: &str) -> Result<SpaceDescription, SpaceFileError> {
    let mut name = None;
    let mut algebra: Option<AlgebraSpec> = None;
    let mut ip = None;
    let mut subalgebra = Vec::new();
    let mut subvectors = Vec::new();
    let mut blocks = Vec::new();
    let mut scales = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.split_whitespace();
        let directive = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        match directive {
            "name" => {
                if args.is_empty() {
                    return Err(err(line, "name needs a value"));
                }
                name = Some(args.join(" "));
            }
            "algebra" => {
                if algebra.is_some() {
                    return Err(err(line, "algebra given twice"));
                }
                algebra = Some(parse_algebra(line, &args)?);
            }
            "bracket" => {
                let Some(AlgebraSpec::Explicit { dim, brackets }) = algebra.as_mut() else {
                    return Err(err(line, "bracket requires a preceding 'algebra explicit N'"));
                };
                if args.len() != 4 {
                    return Err(err(line, "bracket takes i j k value"));
                }
                let idx: Vec<usize> = numbers(line, &args[..3])?;
                let value: f64 = numbers(line, &args[3..])?[0];
                if idx.iter().any(|&i| i >= *dim) {
                    return Err(err(line, format!("bracket index out of range for dimension {dim}")));
                }
                if idx[0] == idx[1] {
                    return Err(err(line, "bracket of a basis vector with itself is zero"));
                }
                brackets.push((idx[0], idx[1], idx[2], value));
            }
            "ip" => {
                ip = Some(match args.first().copied() {
                    Some("identity") if args.len() == 1 => InnerProductSpec::Identity,
                    Some("killing") if args.len() == 1 => InnerProductSpec::Killing,
                    Some("diag") if args.len() > 1 => InnerProductSpec::Diagonal(numbers(line, &args[1..])?),
                    _ => return Err(err(line, "ip takes 'identity', 'killing' or 'diag x_0 ...'")),
                });
            }
            "subalgebra" => subalgebra.extend(numbers::<usize>(line, &args)?),
            "subvector" => {
                if args.is_empty() {
                    return Err(err(line, "subvector needs coordinates"));
                }
                subvectors.push(numbers(line, &args)?);
            }
            "block" => {
                if args.is_empty() {
                    return Err(err(line, "block needs at least one index"));
                }
                blocks.push(numbers(line, &args)?);
            }
            "scales" => {
                if args.is_empty() {
                    return Err(err(line, "scales needs values"));
                }
                scales = Some(numbers(line, &args)?);
            }
            other => return Err(err(line, format!("unknown directive '{other}'"))),
        }
    }
    Ok(SpaceDescription {
        name,
        algebra: algebra.ok_or(SpaceFileError::Missing("algebra"))?,
        ip,
        subalgebra,
        subvectors,
        blocks,
        scales,
    })
}

fn parse_algebra(line: usize, args: &[&str]) -> Result<AlgebraSpec, SpaceFileError> {
    if args.first() == Some(&"explicit") {
        if args.len() != 2 {
            return Err(err(line, "explicit algebra takes its dimension"));
        }
        let dim: usize = numbers(line, &args[1..])?[0];
        if dim == 0 {
            return Err(err(line, "dimension must be positive"));
        }
        return Ok(AlgebraSpec::Explicit {
            dim,
            brackets: Vec::new(),
        });
    }
    let mut summands = Vec::new();
    for term in args.split(|a| *a == "+") {
        match term {
            [family, n] if matches!(*family, "su" | "so" | "sp" | "torus") => {
                summands.push((family.to_string(), numbers(line, &[n])?[0]));
            }
            _ => return Err(err(line, format!("cannot read summand '{}'", term.join(" ")))),
        }
    }
    Ok(AlgebraSpec::Builders(summands))
}
