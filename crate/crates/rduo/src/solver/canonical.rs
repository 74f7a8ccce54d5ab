//! Canonical text serialization of a `LinearModel`, the wire format of the
//! external-backend interface. Line oriented, whitespace separated, floats
//! in shortest round-trip form, `inf`/`-inf` for absent bounds. Writers emit
//! columns in index order; readers accept any order of `var`/`row`/`link`
//! lines within their sections.

use super::{
    Integrality, IndicatorLink, LinRow, LinearModel, Objective, ObjSense, RowSense, SolverError,
    Variable,
};
use std::fmt::Write as _;

pub fn model_to_canonical_text(model: &LinearModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "lpmodel-1");
    let _ = writeln!(
        s,
        "sense {}",
        match model.objective.sense {
            ObjSense::Min => "min",
            ObjSense::Max => "max",
        }
    );
    let _ = writeln!(s, "offset {}", model.objective.offset);
    let _ = writeln!(s, "vars {}", model.num_vars());
    for (j, v) in model.variables.iter().enumerate() {
        let kind = match v.integrality {
            Integrality::Continuous => "continuous",
            Integrality::Binary => "binary",
            Integrality::Integer => "integer",
        };
        let _ = writeln!(
            s,
            "var {} lower {} upper {} kind {} obj {}",
            j, v.lower, v.upper, kind, model.objective.coeffs[j]
        );
    }
    let _ = writeln!(s, "rows {}", model.constraints.len());
    for (i, row) in model.constraints.iter().enumerate() {
        let _ = write!(
            s,
            "row {} sense {} rhs {} nnz",
            i,
            match row.sense {
                RowSense::Le => "le",
                RowSense::Ge => "ge",
                RowSense::Eq => "eq",
            },
            row.rhs
        );
        for (j, c) in row.coeffs.iter().enumerate() {
            if *c != 0.0 {
                let _ = write!(s, " {j}:{c}");
            }
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "links {}", model.indicator_links.len());
    for (k, link) in model.indicator_links.iter().enumerate() {
        let _ = write!(
            s,
            "link {} binary {} on {} rhs {} nnz",
            k,
            link.binary,
            if link.activate_on { 1 } else { 0 },
            link.rhs
        );
        for (j, c) in link.row.iter().enumerate() {
            if *c != 0.0 {
                let _ = write!(s, " {j}:{c}");
            }
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "end");
    s
}

pub fn model_from_canonical_text(text: &str) -> Result<LinearModel, SolverError> {
    let bad = |line: usize, msg: &str| {
        SolverError::Malformed(format!("canonical model, line {}: {msg}", line + 1))
    };
    let mut lines = text.lines().enumerate();
    let (ln, header) = lines
        .next()
        .ok_or_else(|| SolverError::Malformed("empty canonical model".into()))?;
    if header.trim() != "lpmodel-1" {
        return Err(bad(ln, "expected header 'lpmodel-1'"));
    }

    let mut sense = ObjSense::Min;
    let mut offset = 0.0;
    let mut vars: Vec<(Variable, f64)> = Vec::new();
    let mut rows: Vec<LinRow> = Vec::new();
    let mut links: Vec<IndicatorLink> = Vec::new();
    let mut n_declared = 0usize;

    for (ln, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        match key {
            "sense" => {
                sense = match take(&mut toks, "missing sense", ln)? {
                    "min" => ObjSense::Min,
                    "max" => ObjSense::Max,
                    other => return Err(bad(ln, &format!("unknown sense '{other}'"))),
                }
            }
            "offset" => offset = parse_f64(take(&mut toks, "missing offset", ln)?, ln)?,
            "vars" => {
                n_declared = parse_usize(take(&mut toks, "missing count", ln)?, ln)?;
                vars = vec![(Variable::nonneg(), 0.0); n_declared];
            }
            "var" => {
                let j = parse_usize(take(&mut toks, "missing index", ln)?, ln)?;
                if j >= n_declared {
                    return Err(bad(ln, "variable index out of range"));
                }
                expect(&mut toks, "lower", ln)?;
                let lower = parse_f64(take(&mut toks, "missing lower", ln)?, ln)?;
                expect(&mut toks, "upper", ln)?;
                let upper = parse_f64(take(&mut toks, "missing upper", ln)?, ln)?;
                expect(&mut toks, "kind", ln)?;
                let integrality = match take(&mut toks, "missing kind", ln)? {
                    "continuous" => Integrality::Continuous,
                    "binary" => Integrality::Binary,
                    "integer" => Integrality::Integer,
                    other => return Err(bad(ln, &format!("unknown kind '{other}'"))),
                };
                expect(&mut toks, "obj", ln)?;
                let obj = parse_f64(take(&mut toks, "missing obj", ln)?, ln)?;
                vars[j] = (
                    Variable {
                        lower,
                        upper,
                        integrality,
                    },
                    obj,
                );
            }
            "rows" | "links" => {}
            "row" => {
                let _i = parse_usize(take(&mut toks, "missing index", ln)?, ln)?;
                expect(&mut toks, "sense", ln)?;
                let sense = match take(&mut toks, "missing sense", ln)? {
                    "le" => RowSense::Le,
                    "ge" => RowSense::Ge,
                    "eq" => RowSense::Eq,
                    other => return Err(bad(ln, &format!("unknown row sense '{other}'"))),
                };
                expect(&mut toks, "rhs", ln)?;
                let rhs = parse_f64(take(&mut toks, "missing rhs", ln)?, ln)?;
                expect(&mut toks, "nnz", ln)?;
                let mut coeffs = vec![0.0; n_declared];
                for pair in toks {
                    let (j, c) = parse_pair(pair, ln)?;
                    if j >= n_declared {
                        return Err(bad(ln, "coefficient index out of range"));
                    }
                    coeffs[j] = c;
                }
                rows.push(LinRow { coeffs, sense, rhs });
            }
            "link" => {
                let _k = parse_usize(take(&mut toks, "missing index", ln)?, ln)?;
                expect(&mut toks, "binary", ln)?;
                let binary = parse_usize(take(&mut toks, "missing binary", ln)?, ln)?;
                expect(&mut toks, "on", ln)?;
                let activate_on = parse_usize(take(&mut toks, "missing on", ln)?, ln)? != 0;
                expect(&mut toks, "rhs", ln)?;
                let rhs = parse_f64(take(&mut toks, "missing rhs", ln)?, ln)?;
                expect(&mut toks, "nnz", ln)?;
                let mut row = vec![0.0; n_declared];
                for pair in toks {
                    let (j, c) = parse_pair(pair, ln)?;
                    if j >= n_declared {
                        return Err(bad(ln, "coefficient index out of range"));
                    }
                    row[j] = c;
                }
                links.push(IndicatorLink {
                    binary,
                    activate_on,
                    row,
                    rhs,
                });
            }
            "end" => break,
            other => return Err(bad(ln, &format!("unknown directive '{other}'"))),
        }
    }

    let model = LinearModel {
        objective: Objective {
            sense,
            coeffs: vars.iter().map(|(_, c)| *c).collect(),
            offset,
        },
        variables: vars.into_iter().map(|(v, _)| v).collect(),
        constraints: rows,
        indicator_links: links,
    };
    model.validate()?;
    Ok(model)
}

fn take<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    what: &str,
    ln: usize,
) -> Result<&'a str, SolverError> {
    toks.next().ok_or_else(|| {
        SolverError::Malformed(format!("canonical model, line {}: {what}", ln + 1))
    })
}

fn expect<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    word: &str,
    ln: usize,
) -> Result<(), SolverError> {
    match toks.next() {
        Some(t) if t == word => Ok(()),
        other => Err(SolverError::Malformed(format!(
            "canonical model, line {}: expected '{word}', got {:?}",
            ln + 1,
            other
        ))),
    }
}

fn parse_f64(s: &str, ln: usize) -> Result<f64, SolverError> {
    s.parse::<f64>().map_err(|_| {
        SolverError::Malformed(format!("canonical model, line {}: bad number '{s}'", ln + 1))
    })
}

fn parse_usize(s: &str, ln: usize) -> Result<usize, SolverError> {
    s.parse::<usize>().map_err(|_| {
        SolverError::Malformed(format!("canonical model, line {}: bad index '{s}'", ln + 1))
    })
}

fn parse_pair(s: &str, ln: usize) -> Result<(usize, f64), SolverError> {
    let (a, b) = s.split_once(':').ok_or_else(|| {
        SolverError::Malformed(format!(
            "canonical model, line {}: expected index:value, got '{s}'",
            ln + 1
        ))
    })?;
    Ok((parse_usize(a, ln)?, parse_f64(b, ln)?))
}
