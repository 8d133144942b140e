use std::collections::HashMap;

use num_bigint::BigInt;

use super::{check_atom_shape, Edge, Location, ModelError, PtaModel};
use crate::constraints::{CompOp, Context, Inequality, LinearTerm, Polyhedron, Variable};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 18] = [
    "->", "<=", ">=", "!=", "==", ";", ",", "{", "}", "&", "*", "+", "-", "<", ">", "=", "(", ")",
];

fn lex(text: &str) -> Result<Vec<Token>, ModelError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let col = i + 1;
            if ch == '#' {
                break;
            }
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            if ch.is_ascii_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: line_no,
                    col,
                });
                continue;
            }
            if ch.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Int(digits.parse().expect("digits")),
                    line: line_no,
                    col,
                });
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let sym = SYMBOLS.iter().find(|s| rest.starts_with(**s));
            match sym {
                Some(s) => {
                    out.push(Token {
                        tok: Tok::Sym(s),
                        line: line_no,
                        col,
                    });
                    i += s.len();
                }
                None => {
                    return Err(ModelError::Syntax {
                        line: line_no,
                        col,
                        msg: format!("unexpected character `{ch}`"),
                    })
                }
            }
        }
    }
    let (line, col) = out.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AtomOp {
    Cmp(CompOp),
    Ne,
}

#[derive(Clone, Debug)]
struct RawAtom {
    lhs: LinearTerm,
    op: AtomOp,
    rhs: LinearTerm,
    line: usize,
    col: usize,
}

struct RawLocation {
    name: String,
    initial: bool,
    invariant: Vec<RawAtom>,
    line: usize,
    col: usize,
}

struct RawEdge {
    source: (String, usize, usize),
    target: (String, usize, usize),
    action: Option<(String, usize, usize)>,
    guard: Vec<RawAtom>,
    resets: Vec<(String, usize, usize)>,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: HashMap<String, Variable>,
    clocks: Vec<String>,
    params: Vec<String>,
    actions: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, ModelError> {
        Err(ModelError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == kw)
    }

    fn expect_sym(&mut self, s: &str) -> Result<Token, ModelError> {
        let t = self.next();
        match &t.tok {
            Tok::Sym(x) if *x == s => Ok(t),
            _ => self.err(&t, format!("expected `{s}`, found {}", describe(&t.tok))),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, usize, usize), ModelError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(ref s) => Ok((s.clone(), t.line, t.col)),
            _ => self.err(
                &t,
                format!("expected identifier, found {}", describe(&t.tok)),
            ),
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ModelError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(()),
            _ => self.err(&t, format!("expected `{kw}`, found {}", describe(&t.tok))),
        }
    }

    /// Comma-separated identifiers up to (not including) `;`.
    fn ident_list(&mut self) -> Result<Vec<(String, usize, usize)>, ModelError> {
        let mut out = Vec::new();
        if self.is_sym(";") {
            return Ok(out);
        }
        loop {
            out.push(self.expect_ident()?);
            if self.is_sym(",") {
                self.next();
            } else {
                break;
            }
        }
        Ok(out)
    }

    fn declare(
        &mut self,
        names: Vec<(String, usize, usize)>,
        kind: Option<bool>,
    ) -> Result<(), ModelError> {
        for (name, line, col) in names {
            let taken = self.vars.contains_key(&name) || self.actions.contains(&name);
            if taken {
                return Err(ModelError::Syntax {
                    line,
                    col,
                    msg: format!("`{name}` declared twice"),
                });
            }
            match kind {
                Some(true) => {
                    self.vars
                        .insert(name.clone(), Variable::clock(self.clocks.len()));
                    self.clocks.push(name);
                }
                Some(false) => {
                    self.vars
                        .insert(name.clone(), Variable::param(self.params.len()));
                    self.params.push(name);
                }
                None => self.actions.push(name),
            }
        }
        Ok(())
    }

    fn factor(&mut self) -> Result<LinearTerm, ModelError> {
        let t = self.next();
        match t.tok {
            Tok::Int(ref n) => {
                // implicit product `2x`
                if let Tok::Ident(_) = self.peek().tok {
                    let var = self.variable()?;
                    return Ok(LinearTerm::scaled_var(var, n.clone()));
                }
                Ok(LinearTerm::constant(n.clone()))
            }
            Tok::Ident(ref s) => match self.vars.get(s) {
                Some(v) => Ok(LinearTerm::var(*v)),
                None => Err(ModelError::Undeclared {
                    line: t.line,
                    col: t.col,
                    name: s.clone(),
                }),
            },
            Tok::Sym("(") => {
                let inner = self.linear()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            _ => self.err(&t, format!("expected a term, found {}", describe(&t.tok))),
        }
    }

    fn variable(&mut self) -> Result<Variable, ModelError> {
        let (name, line, col) = self.expect_ident()?;
        self.vars
            .get(&name)
            .copied()
            .ok_or(ModelError::Undeclared { line, col, name })
    }

    fn product(&mut self) -> Result<LinearTerm, ModelError> {
        let start = self.peek().clone();
        let mut acc = self.factor()?;
        while self.is_sym("*") {
            self.next();
            let rhs = self.factor()?;
            acc = if acc.is_constant() {
                rhs.scale(acc.constant_part())
            } else if rhs.is_constant() {
                acc.scale(rhs.constant_part())
            } else {
                return Err(ModelError::NonLinear {
                    line: start.line,
                    col: start.col,
                });
            };
        }
        Ok(acc)
    }

    fn linear(&mut self) -> Result<LinearTerm, ModelError> {
        let mut negate = false;
        if self.is_sym("-") {
            self.next();
            negate = true;
        } else if self.is_sym("+") {
            self.next();
        }
        let first = self.product()?;
        let mut acc = if negate { -first } else { first };
        loop {
            if self.is_sym("+") {
                self.next();
                acc = acc + self.product()?;
            } else if self.is_sym("-") {
                self.next();
                acc = acc - self.product()?;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn comparison(&mut self) -> Option<AtomOp> {
        let op = match &self.peek().tok {
            Tok::Sym("<") => AtomOp::Cmp(CompOp::Lt),
            Tok::Sym("<=") => AtomOp::Cmp(CompOp::Le),
            Tok::Sym("=") | Tok::Sym("==") => AtomOp::Cmp(CompOp::Eq),
            Tok::Sym(">=") => AtomOp::Cmp(CompOp::Ge),
            Tok::Sym(">") => AtomOp::Cmp(CompOp::Gt),
            Tok::Sym("!=") => AtomOp::Ne,
            _ => return None,
        };
        self.next();
        Some(op)
    }

    /// `true`, `false`, or `&`-joined (possibly chained) comparisons.
    fn conjunction(&mut self) -> Result<Vec<RawAtom>, ModelError> {
        let mut atoms = Vec::new();
        loop {
            let t = self.peek().clone();
            if self.is_kw("true") {
                self.next();
            } else if self.is_kw("false") {
                self.next();
                atoms.push(RawAtom {
                    lhs: LinearTerm::zero(),
                    op: AtomOp::Cmp(CompOp::Lt),
                    rhs: LinearTerm::zero(),
                    line: t.line,
                    col: t.col,
                });
            } else {
                let mut lhs = self.linear()?;
                let Some(mut op) = self.comparison() else {
                    let bad = self.peek().clone();
                    return self.err(
                        &bad,
                        format!("expected a comparison, found {}", describe(&bad.tok)),
                    );
                };
                loop {
                    let rhs = self.linear()?;
                    atoms.push(RawAtom {
                        lhs: lhs.clone(),
                        op,
                        rhs: rhs.clone(),
                        line: t.line,
                        col: t.col,
                    });
                    match self.comparison() {
                        Some(next) => {
                            lhs = rhs;
                            op = next;
                        }
                        None => break,
                    }
                }
            }
            if self.is_sym("&") {
                self.next();
            } else {
                break;
            }
        }
        Ok(atoms)
    }

    fn location(&mut self) -> Result<RawLocation, ModelError> {
        let (name, line, col) = self.expect_ident()?;
        let mut loc = RawLocation {
            name,
            initial: false,
            invariant: Vec::new(),
            line,
            col,
        };
        self.expect_sym("{")?;
        while !self.is_sym("}") {
            let t = self.next();
            match &t.tok {
                Tok::Ident(k) if k == "initial" => loc.initial = true,
                Tok::Ident(k) if k == "invariant" => {
                    let atoms = self.conjunction()?;
                    loc.invariant.extend(atoms);
                }
                _ => {
                    return self.err(
                        &t,
                        format!("unexpected {} in location body", describe(&t.tok)),
                    )
                }
            }
            self.expect_sym(";")?;
        }
        self.expect_sym("}")?;
        Ok(loc)
    }

    fn edge(&mut self, line: usize, col: usize) -> Result<RawEdge, ModelError> {
        let source = self.expect_ident()?;
        self.expect_sym("->")?;
        let target = self.expect_ident()?;
        let mut edge = RawEdge {
            source,
            target,
            action: None,
            guard: Vec::new(),
            resets: Vec::new(),
            line,
            col,
        };
        self.expect_sym("{")?;
        while !self.is_sym("}") {
            let t = self.next();
            match &t.tok {
                Tok::Ident(k) if k == "sync" => {
                    if edge.action.is_some() {
                        return self.err(&t, "edge has two `sync` statements");
                    }
                    edge.action = Some(self.expect_ident()?);
                }
                Tok::Ident(k) if k == "guard" => {
                    let atoms = self.conjunction()?;
                    edge.guard.extend(atoms);
                }
                Tok::Ident(k) if k == "reset" => {
                    let ids = self.ident_list()?;
                    edge.resets.extend(ids);
                }
                _ => return self.err(&t, format!("unexpected {} in edge body", describe(&t.tok))),
            }
            self.expect_sym(";")?;
        }
        self.expect_sym("}")?;
        Ok(edge)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn lower(ctx: &Context, a: &RawAtom, op: CompOp) -> Inequality {
    Inequality::compare(ctx, &a.lhs, op, &a.rhs)
}

fn shape_error(a: &RawAtom, msg: String) -> ModelError {
    ModelError::Syntax {
        line: a.line,
        col: a.col,
        msg,
    }
}

/// Parses the model text format.
pub fn parse(text: &str) -> Result<PtaModel, ModelError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vars: HashMap::new(),
        clocks: Vec::new(),
        params: Vec::new(),
        actions: Vec::new(),
    };
    p.expect_kw("pta")?;
    let (name, _, _) = p.expect_ident()?;
    p.expect_sym(";")?;
    let mut allow_diagonals = false;
    let mut locations: Vec<RawLocation> = Vec::new();
    let mut edges: Vec<RawEdge> = Vec::new();
    loop {
        let t = p.next();
        match &t.tok {
            Tok::Eof => break,
            Tok::Ident(k) if k == "allow" => {
                p.expect_sym("-")?;
                p.expect_kw("diagonals")?;
                allow_diagonals = true;
            }
            Tok::Ident(k) if k == "clocks" => {
                let ids = p.ident_list()?;
                p.declare(ids, Some(true))?;
            }
            Tok::Ident(k) if k == "parameters" => {
                let ids = p.ident_list()?;
                p.declare(ids, Some(false))?;
            }
            Tok::Ident(k) if k == "actions" => {
                let ids = p.ident_list()?;
                p.declare(ids, None)?;
            }
            Tok::Ident(k) if k == "location" => {
                let loc = p.location()?;
                if locations.iter().any(|l| l.name == loc.name) {
                    return Err(ModelError::Syntax {
                        line: loc.line,
                        col: loc.col,
                        msg: format!("location `{}` declared twice", loc.name),
                    });
                }
                locations.push(loc);
                continue;
            }
            Tok::Ident(k) if k == "edge" => {
                let e = p.edge(t.line, t.col)?;
                edges.push(e);
                continue;
            }
            _ => return p.err(&t, format!("unexpected {} at top level", describe(&t.tok))),
        }
        p.expect_sym(";")?;
    }

    let ctx = Context::new(p.clocks.len(), p.params.len());
    let initials: Vec<&RawLocation> = locations.iter().filter(|l| l.initial).collect();
    match initials.len() {
        1 => {}
        0 => return Err(ModelError::Invalid("no initial location".into())),
        _ => {
            return Err(ModelError::Syntax {
                line: initials[1].line,
                col: initials[1].col,
                msg: "second initial location".into(),
            })
        }
    }
    let mut out_locs = Vec::with_capacity(locations.len());
    let mut initial = 0;
    for (id, l) in locations.iter().enumerate() {
        if l.initial {
            initial = id;
        }
        let mut atoms = Vec::new();
        for a in &l.invariant {
            let AtomOp::Cmp(op) = a.op else {
                return Err(shape_error(a, "`!=` is not allowed in invariants".into()));
            };
            let ineq = lower(&ctx, a, op);
            if ineq.trivially_true() == Some(true) {
                continue;
            }
            check_atom_shape(&ineq, &ctx, allow_diagonals).map_err(|m| shape_error(a, m))?;
            atoms.push(ineq);
        }
        out_locs.push(Location {
            id,
            name: l.name.clone(),
            invariant: Polyhedron::from_inequalities(ctx, atoms).expect("context"),
        });
    }

    let loc_id = |(name, line, col): &(String, usize, usize)| -> Result<usize, ModelError> {
        locations
            .iter()
            .position(|l| &l.name == name)
            .ok_or_else(|| ModelError::Undeclared {
                line: *line,
                col: *col,
                name: name.clone(),
            })
    };
    let mut out_edges: Vec<Edge> = Vec::new();
    for e in &edges {
        let source = loc_id(&e.source)?;
        let target = loc_id(&e.target)?;
        let Some((act, aline, acol)) = &e.action else {
            return Err(ModelError::Syntax {
                line: e.line,
                col: e.col,
                msg: "edge without `sync` statement".into(),
            });
        };
        let action =
            p.actions
                .iter()
                .position(|a| a == act)
                .ok_or_else(|| ModelError::Undeclared {
                    line: *aline,
                    col: *acol,
                    name: act.clone(),
                })?;
        let mut resets = Vec::new();
        for (r, line, col) in &e.resets {
            match p.vars.get(r) {
                Some(v) if v.is_clock() => resets.push(v.index),
                Some(_) => {
                    return Err(ModelError::Syntax {
                        line: *line,
                        col: *col,
                        msg: format!("`{r}` is not a clock"),
                    })
                }
                None => {
                    return Err(ModelError::Undeclared {
                        line: *line,
                        col: *col,
                        name: r.clone(),
                    })
                }
            }
        }
        resets.sort_unstable();
        resets.dedup();
        // each `!=` atom doubles the edge into a `<` copy and a `>` copy
        let mut variants: Vec<Vec<Inequality>> = vec![Vec::new()];
        for a in &e.guard {
            let choices: Vec<Inequality> = match a.op {
                AtomOp::Cmp(op) => vec![lower(&ctx, a, op)],
                AtomOp::Ne => vec![lower(&ctx, a, CompOp::Lt), lower(&ctx, a, CompOp::Gt)],
            };
            for c in &choices {
                check_atom_shape(c, &ctx, allow_diagonals).map_err(|m| shape_error(a, m))?;
            }
            let mut next = Vec::with_capacity(variants.len() * choices.len());
            for v in &variants {
                for c in &choices {
                    let mut w = v.clone();
                    w.push(c.clone());
                    next.push(w);
                }
            }
            variants = next;
        }
        for atoms in variants {
            let atoms: Vec<Inequality> = atoms
                .into_iter()
                .filter(|a| a.trivially_true() != Some(true))
                .collect();
            out_edges.push(Edge {
                id: out_edges.len(),
                source,
                target,
                action,
                guard: Polyhedron::from_inequalities(ctx, atoms).expect("context"),
                resets: resets.clone(),
            });
        }
    }

    let model = PtaModel {
        name,
        allow_diagonals,
        actions: p.actions,
        clocks: p.clocks,
        params: p.params,
        locations: out_locs,
        initial,
        edges: out_edges,
    };
    model.validate()?;
    Ok(model)
}
