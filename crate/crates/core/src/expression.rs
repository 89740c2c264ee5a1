//! The assembled splitting expression and its two serialized forms.
//!
//! The text form uses `S^{p,q}` and `J_i` tokens joined by `∨`, with the
//! minus part grouped under a single multiplicity prefix:
//!
//! ```text
//! S^{0,0} ∨ J_1 ∨ S^{2,1} ∨ 2×(S^{0,0} ∨ S^{1,0})
//! ```
//!
//! The JSON form is the stable document schema with fields `g`, `lambda`,
//! `n_components`, `plus_part` (objects `{p, q, j_index}`), `minus_part`
//! (objects `{i, multiplicity}`) and `verification`; field order is fixed
//! by declaration and all arrays are sorted, so rendering is
//! deterministic. `parse(render(e)) = e` holds for both formats.

use crate::comb::binomial;
use crate::motive::PlusPartCell;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpressionError {
    #[error("cannot parse splitting expression: {0}")]
    Parse(String),
    #[error("inconsistent expression: {0}")]
    Inconsistent(String),
}

/// One minus-part summand: the sphere `S^{i,0}` with its total
/// multiplicity `n * C(g, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinusSphere {
    pub degree: usize,
    pub multiplicity: u64,
}

/// The integral fallback shape `S^{0,0} ∨ F ∨ S^{2g,g}` with an opaque
/// middle factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralFallback {
    pub g: usize,
}

/// A full wedge splitting: plus-part cells, minus-part spheres, or (when
/// the coefficient gate fails) just the three-summand integral shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingExpression {
    pub g: usize,
    /// `n(X)`; absent on the integral fallback, which does not see the
    /// real locus.
    pub n_components: Option<u64>,
    /// Sorted by (bidegree, j_index).
    pub plus_part: Vec<PlusPartCell>,
    /// Sorted by degree; multiplicity of `S^{i,0}` is `n * C(g, i)`.
    pub minus_part: Vec<MinusSphere>,
    pub integral_fallback: Option<IntegralFallback>,
}

impl SplittingExpression {
    pub fn total_summands(&self) -> u64 {
        if self.integral_fallback.is_some() {
            return 3;
        }
        self.plus_part.len() as u64 + self.minus_part.iter().map(|m| m.multiplicity).sum::<u64>()
    }

    pub fn is_fallback(&self) -> bool {
        self.integral_fallback.is_some()
    }
}

/// Output format of [`render`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Json,
}

/// Coefficient-ring description inside the JSON document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaDoc {
    pub inverted_primes: Vec<u64>,
    pub rational: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlusCellDoc {
    pub p: usize,
    pub q: usize,
    pub j_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinusSphereDoc {
    pub i: usize,
    pub multiplicity: u64,
}

/// The stable JSON document: one schema for `split`, `verify`,
/// `components` and plain expression rendering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitDocument {
    pub schema_version: u32,
    pub status: String,
    pub g: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaDoc>,
    pub n_components: Option<u64>,
    pub plus_part: Vec<PlusCellDoc>,
    pub minus_part: Vec<MinusSphereDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral_fallback: Option<IntegralFallback>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default)]
    pub verification: BTreeMap<String, String>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl SplitDocument {
    pub fn from_expression(expr: &SplittingExpression) -> Self {
        SplitDocument {
            schema_version: SCHEMA_VERSION,
            status: "ok".into(),
            g: expr.g,
            lambda: None,
            n_components: expr.n_components,
            plus_part: expr
                .plus_part
                .iter()
                .map(|c| PlusCellDoc {
                    p: c.sphere_bidegree.0,
                    q: c.sphere_bidegree.1,
                    j_index: c.j_index,
                })
                .collect(),
            minus_part: expr
                .minus_part
                .iter()
                .map(|m| MinusSphereDoc {
                    i: m.degree,
                    multiplicity: m.multiplicity,
                })
                .collect(),
            integral_fallback: expr.integral_fallback,
            notes: Vec::new(),
            verification: BTreeMap::new(),
        }
    }

    pub fn to_expression(&self) -> SplittingExpression {
        let mut plus_part: Vec<PlusPartCell> = self
            .plus_part
            .iter()
            .map(|c| PlusPartCell {
                sphere_bidegree: (c.p, c.q),
                j_index: c.j_index,
            })
            .collect();
        plus_part.sort_unstable();
        let mut minus_part: Vec<MinusSphere> = self
            .minus_part
            .iter()
            .map(|m| MinusSphere {
                degree: m.i,
                multiplicity: m.multiplicity,
            })
            .collect();
        minus_part.sort_unstable_by_key(|m| m.degree);
        SplittingExpression {
            g: self.g,
            n_components: self.n_components,
            plus_part,
            minus_part,
            integral_fallback: self.integral_fallback,
        }
    }
}

fn plus_cell_token(cell: &PlusPartCell) -> String {
    let (p, q) = cell.sphere_bidegree;
    if cell.j_index == 0 {
        format!("S^{{{p},{q}}}")
    } else if (p, q) == (0, 0) {
        format!("J_{}", cell.j_index)
    } else {
        format!("S^{{{p},{q}}} ∧ J_{}", cell.j_index)
    }
}

/// Renders the expression. Text output lists the plus-part cells sorted
/// by (bidegree, j_index), then the minus part as one
/// `n×( ... )` group whose inner multiplicities are the binomials
/// `C(g, i)`.
pub fn render(expr: &SplittingExpression, format: RenderFormat) -> String {
    match format {
        RenderFormat::Json => serde_json::to_string_pretty(&SplitDocument::from_expression(expr))
            .expect("document serialization cannot fail"),
        RenderFormat::Text => {
            if let Some(fb) = &expr.integral_fallback {
                return format!("S^{{0,0}} ∨ F ∨ S^{{{},{}}}", 2 * fb.g, fb.g);
            }
            let mut parts: Vec<String> = expr.plus_part.iter().map(plus_cell_token).collect();
            if let Some(n) = expr.n_components {
                let inner: Vec<String> = expr
                    .minus_part
                    .iter()
                    .map(|m| {
                        let per_copy = m.multiplicity.checked_div(n).unwrap_or(0);
                        if per_copy == 1 {
                            format!("S^{{{},0}}", m.degree)
                        } else {
                            format!("{per_copy}×S^{{{},0}}", m.degree)
                        }
                    })
                    .collect();
                parts.push(format!("{n}×({})", inner.join(" ∨ ")));
            }
            parts.join(" ∨ ")
        }
    }
}

/// Parses either format back into an expression; inverse to [`render`].
pub fn parse(s: &str, format: RenderFormat) -> Result<SplittingExpression, ExpressionError> {
    match format {
        RenderFormat::Json => {
            let doc: SplitDocument =
                serde_json::from_str(s).map_err(|e| ExpressionError::Parse(e.to_string()))?;
            Ok(doc.to_expression())
        }
        RenderFormat::Text => parse_text(s),
    }
}

/// Splits at top-level `∨` separators, respecting parentheses.
fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            '∨' if depth == 0 => {
                parts.push(current.trim().to_string());
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

fn parse_sphere(token: &str) -> Result<(usize, usize), ExpressionError> {
    let inner = token
        .strip_prefix("S^{")
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| ExpressionError::Parse(format!("bad sphere token `{token}`")))?;
    let (p, q) = inner
        .split_once(',')
        .ok_or_else(|| ExpressionError::Parse(format!("bad sphere bidegree `{token}`")))?;
    let p = p
        .trim()
        .parse::<usize>()
        .map_err(|_| ExpressionError::Parse(format!("bad sphere degree in `{token}`")))?;
    let q = q
        .trim()
        .parse::<usize>()
        .map_err(|_| ExpressionError::Parse(format!("bad sphere weight in `{token}`")))?;
    Ok((p, q))
}

fn parse_text(s: &str) -> Result<SplittingExpression, ExpressionError> {
    let mut plus_cells: Vec<PlusPartCell> = Vec::new();
    let mut minus_group: Option<(u64, Vec<(usize, u64)>)> = None;
    let mut saw_fallback = false;
    let mut bare_spheres: Vec<(usize, usize)> = Vec::new();

    for token in split_top_level(s.trim()) {
        if token == "F" {
            saw_fallback = true;
        } else if let Some((prefix, rest)) = token.split_once('×') {
            let mult: u64 = prefix.trim().parse().map_err(|_| {
                ExpressionError::Parse(format!("bad multiplicity prefix in `{token}`"))
            })?;
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| {
                    ExpressionError::Parse(format!("expected parenthesized group in `{token}`"))
                })?;
            let mut spheres = Vec::new();
            for part in split_top_level(inner) {
                let (per_copy, sphere_tok) = match part.split_once('×') {
                    Some((m, t)) => (
                        m.trim().parse::<u64>().map_err(|_| {
                            ExpressionError::Parse(format!("bad inner multiplicity `{part}`"))
                        })?,
                        t.trim().to_string(),
                    ),
                    None => (1, part),
                };
                let (p, q) = parse_sphere(&sphere_tok)?;
                if q != 0 {
                    return Err(ExpressionError::Parse(format!(
                        "minus-part sphere must have weight 0, got S^{{{p},{q}}}"
                    )));
                }
                spheres.push((p, per_copy));
            }
            if minus_group.is_some() {
                return Err(ExpressionError::Parse(
                    "more than one minus-part group".into(),
                ));
            }
            minus_group = Some((mult, spheres));
        } else if let Some((sphere_tok, j_tok)) = token.split_once('∧') {
            let (p, q) = parse_sphere(sphere_tok.trim())?;
            let j = j_tok
                .trim()
                .strip_prefix("J_")
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| ExpressionError::Parse(format!("bad J token `{token}`")))?;
            plus_cells.push(PlusPartCell {
                sphere_bidegree: (p, q),
                j_index: j,
            });
        } else if let Some(j) = token.strip_prefix("J_") {
            let j = j
                .parse::<usize>()
                .map_err(|_| ExpressionError::Parse(format!("bad J token `{token}`")))?;
            plus_cells.push(PlusPartCell {
                sphere_bidegree: (0, 0),
                j_index: j,
            });
        } else {
            bare_spheres.push(parse_sphere(&token)?);
        }
    }

    if saw_fallback {
        // expect exactly S^{0,0} and S^{2g,g}
        if !plus_cells.is_empty() || minus_group.is_some() || bare_spheres.len() != 2 {
            return Err(ExpressionError::Parse(
                "fallback expression must be S^{0,0} ∨ F ∨ S^{2g,g}".into(),
            ));
        }
        let top = bare_spheres
            .iter()
            .find(|&&(p, q)| p == 2 * q && q > 0)
            .ok_or_else(|| ExpressionError::Parse("missing top cell S^{2g,g}".into()))?;
        return Ok(SplittingExpression {
            g: top.1,
            n_components: None,
            plus_part: Vec::new(),
            minus_part: Vec::new(),
            integral_fallback: Some(IntegralFallback { g: top.1 }),
        });
    }

    // bare spheres outside a group are plus-part cells smashed with J_0
    for (p, q) in bare_spheres {
        plus_cells.push(PlusPartCell {
            sphere_bidegree: (p, q),
            j_index: 0,
        });
    }
    let (n, spheres) =
        minus_group.ok_or_else(|| ExpressionError::Parse("missing minus-part group".into()))?;
    let g = spheres
        .iter()
        .map(|&(i, _)| i)
        .max()
        .ok_or_else(|| ExpressionError::Parse("empty minus-part group".into()))?;
    let minus_part: Vec<MinusSphere> = spheres
        .into_iter()
        .map(|(i, per_copy)| MinusSphere {
            degree: i,
            multiplicity: per_copy * n,
        })
        .collect();
    plus_cells.sort_unstable();
    Ok(SplittingExpression {
        g,
        n_components: Some(n),
        plus_part: plus_cells,
        minus_part,
        integral_fallback: None,
    })
}

/// Validates the structural invariants: minus-part multiplicities are
/// `n * C(g, i)` for `0 <= i <= g`, and plus-part bidegrees are
/// Tate-type.
pub fn validate_expression(expr: &SplittingExpression) -> Result<(), ExpressionError> {
    if expr.is_fallback() {
        return Ok(());
    }
    let n = expr
        .n_components
        .ok_or_else(|| ExpressionError::Inconsistent("missing component count".into()))?;
    let degrees: BTreeSet<usize> = expr.minus_part.iter().map(|m| m.degree).collect();
    let expected: BTreeSet<usize> = (0..=expr.g).collect();
    if degrees != expected {
        return Err(ExpressionError::Inconsistent(format!(
            "minus part must carry S^{{i,0}} for exactly 0 <= i <= g = {}",
            expr.g
        )));
    }
    for m in &expr.minus_part {
        let c = binomial(expr.g as i64, m.degree as u64)
            .to_u64()
            .ok_or_else(|| ExpressionError::Inconsistent("binomial overflow".into()))?;
        if m.multiplicity != n * c {
            return Err(ExpressionError::Inconsistent(format!(
                "S^{{{},0}} has multiplicity {}, expected n*C(g,i) = {}",
                m.degree,
                m.multiplicity,
                n * c
            )));
        }
    }
    for cell in &expr.plus_part {
        if cell.sphere_bidegree.0 != 2 * cell.sphere_bidegree.1 {
            return Err(ExpressionError::Inconsistent(format!(
                "plus-part bidegree ({}, {}) is not Tate-type",
                cell.sphere_bidegree.0, cell.sphere_bidegree.1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elliptic_expression(n: u64) -> SplittingExpression {
        SplittingExpression {
            g: 1,
            n_components: Some(n),
            plus_part: vec![
                PlusPartCell::new(0, 0),
                PlusPartCell::new(0, 1),
                PlusPartCell::new(1, 0),
            ],
            minus_part: vec![
                MinusSphere {
                    degree: 0,
                    multiplicity: n,
                },
                MinusSphere {
                    degree: 1,
                    multiplicity: n,
                },
            ],
            integral_fallback: None,
        }
    }

    #[test]
    fn text_render_elliptic() {
        assert_eq!(
            render(&elliptic_expression(1), RenderFormat::Text),
            "S^{0,0} ∨ J_1 ∨ S^{2,1} ∨ 1×(S^{0,0} ∨ S^{1,0})"
        );
        assert_eq!(
            render(&elliptic_expression(2), RenderFormat::Text),
            "S^{0,0} ∨ J_1 ∨ S^{2,1} ∨ 2×(S^{0,0} ∨ S^{1,0})"
        );
    }

    #[test]
    fn text_round_trip() {
        for expr in [elliptic_expression(1), elliptic_expression(2)] {
            let text = render(&expr, RenderFormat::Text);
            assert_eq!(parse(&text, RenderFormat::Text).unwrap(), expr);
        }
    }

    #[test]
    fn json_round_trip() {
        let expr = elliptic_expression(2);
        let json = render(&expr, RenderFormat::Json);
        assert_eq!(parse(&json, RenderFormat::Json).unwrap(), expr);
    }

    #[test]
    fn fallback_render_and_parse() {
        let fb = SplittingExpression {
            g: 2,
            n_components: None,
            plus_part: Vec::new(),
            minus_part: Vec::new(),
            integral_fallback: Some(IntegralFallback { g: 2 }),
        };
        let text = render(&fb, RenderFormat::Text);
        assert_eq!(text, "S^{0,0} ∨ F ∨ S^{4,2}");
        assert_eq!(parse(&text, RenderFormat::Text).unwrap(), fb);
        let json = render(&fb, RenderFormat::Json);
        assert_eq!(parse(&json, RenderFormat::Json).unwrap(), fb);
    }

    #[test]
    fn validate_catches_bad_multiplicity() {
        let mut expr = elliptic_expression(2);
        assert!(validate_expression(&expr).is_ok());
        expr.minus_part[0].multiplicity = 3;
        assert!(validate_expression(&expr).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse("S^{1", RenderFormat::Text).is_err());
        assert!(parse("J_x ∨ 1×(S^{0,0})", RenderFormat::Text).is_err());
        assert!(parse("S^{0,0}", RenderFormat::Text).is_err());
    }
}
