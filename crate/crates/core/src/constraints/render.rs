use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use super::disjunctive::DisjunctiveConstraint;
use super::linear::{Context, Inequality, Rational, Relation};
use super::polyhedron::Polyhedron;

/// Display names by dense position (clocks first, then parameters).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
}

impl VarNames {
    pub fn new(clocks: &[String], params: &[String]) -> Self {
        VarNames {
            names: clocks.iter().chain(params).cloned().collect(),
        }
    }

    /// `x1, x2, …, p1, p2, …` for a bare context.
    pub fn positional(ctx: &Context) -> Self {
        let clocks: Vec<String> = (1..=ctx.clocks).map(|i| format!("x{i}")).collect();
        let params: Vec<String> = (1..=ctx.params).map(|i| format!("p{i}")).collect();
        Self::new(&clocks, &params)
    }

    /// Names for the parameter-only restriction of this naming.
    pub fn params_only(&self, ctx: &Context) -> Self {
        VarNames {
            names: self.names[ctx.clocks..].to_vec(),
        }
    }

    pub fn name(&self, pos: usize) -> &str {
        &self.names[pos]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn push_term(out: &mut String, coeff: &BigInt, name: &str) {
    let mag = coeff.abs();
    if out.is_empty() {
        if coeff.is_negative() {
            out.push('-');
        }
    } else if coeff.is_negative() {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    if mag.is_one() {
        out.push_str(name);
    } else {
        let _ = write!(out, "{mag}*{name}");
    }
}

fn push_constant(out: &mut String, k: &BigInt) {
    if k.is_zero() {
        if out.is_empty() {
            out.push('0');
        }
        return;
    }
    if out.is_empty() {
        let _ = write!(out, "{k}");
    } else if k.is_negative() {
        let _ = write!(out, " - {}", -k);
    } else {
        let _ = write!(out, " + {k}");
    }
}

/// `lhs op rhs` with the lowest-index variable on the left with a positive
/// coefficient; other positive terms stay left, negative ones move right.
pub fn render_inequality(ineq: &Inequality, names: &VarNames) -> String {
    if let Some(truth) = ineq.trivially_true() {
        return if truth { "true".into() } else { "false".into() };
    }
    let lead_negative = ineq
        .coefficients()
        .iter()
        .find(|c| !c.is_zero())
        .is_some_and(|c| c.is_negative());
    let (coeffs, constant, op): (Vec<BigInt>, BigInt, &str) = if lead_negative {
        let op = match ineq.relation() {
            Relation::Lt => ">",
            Relation::Le => ">=",
            Relation::Eq => "=",
        };
        (
            ineq.coefficients().iter().map(|c| -c).collect(),
            -ineq.constant(),
            op,
        )
    } else {
        (
            ineq.coefficients().to_vec(),
            ineq.constant().clone(),
            ineq.relation().symbol(),
        )
    };
    let mut lhs = String::new();
    let mut rhs = String::new();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_positive() {
            push_term(&mut lhs, c, names.name(i));
        }
    }
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_negative() {
            push_term(&mut rhs, &-c, names.name(i));
        }
    }
    push_constant(&mut rhs, &-constant);
    format!("{lhs} {op} {rhs}")
}

pub fn render_polyhedron(p: &Polyhedron, names: &VarNames) -> String {
    if p.is_canonical() && p.is_empty() {
        return "false".into();
    }
    let parts: Vec<String> = p
        .inequalities()
        .iter()
        .filter(|a| a.trivially_true() != Some(true))
        .map(|a| render_inequality(a, names))
        .collect();
    if parts.is_empty() {
        "true".into()
    } else {
        parts.join(" & ")
    }
}

pub fn render_disjunctive(d: &DisjunctiveConstraint, names: &VarNames) -> String {
    match d.disjuncts() {
        [] => "false".into(),
        [only] => render_polyhedron(only, names),
        many => many
            .iter()
            .map(|p| format!("({})", render_polyhedron(p, names)))
            .collect::<Vec<_>>()
            .join(" | "),
    }
}

fn int_value(k: &BigInt) -> Value {
    match k.to_i64() {
        Some(v) => json!(v),
        None => json!(k.to_string()),
    }
}

pub fn inequality_json(ineq: &Inequality, names: &VarNames) -> Value {
    let mut lhs = Map::new();
    for (i, c) in ineq.coefficients().iter().enumerate() {
        if !c.is_zero() {
            lhs.insert(names.name(i).to_string(), int_value(c));
        }
    }
    lhs.insert("const".into(), int_value(ineq.constant()));
    json!({ "lhs": lhs, "rel": ineq.relation().symbol() })
}

pub fn polyhedron_json(p: &Polyhedron, names: &VarNames) -> Value {
    Value::Array(
        p.inequalities()
            .iter()
            .map(|a| inequality_json(a, names))
            .collect(),
    )
}

/// A disjunct list; each disjunct is a list of `term ⋈ 0` atoms.
pub fn disjunctive_json(d: &DisjunctiveConstraint, names: &VarNames) -> Value {
    Value::Array(
        d.disjuncts()
            .iter()
            .map(|p| polyhedron_json(p, names))
            .collect(),
    )
}

pub fn rational_json(r: &Rational) -> Value {
    if r.denom().is_one() {
        int_value(r.numer())
    } else {
        json!(format_rational(r))
    }
}
