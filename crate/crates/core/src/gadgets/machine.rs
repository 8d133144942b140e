//! Deterministic two-counter machines: text format and a direct interpreter.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::GadgetError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Counter {
    C1,
    C2,
}

impl Counter {
    pub fn index(self) -> usize {
        match self {
            Counter::C1 => 0,
            Counter::C2 => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Counter::C1 => "c1",
            Counter::C2 => "c2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    /// `c := c + 1`, then go to the state.
    Inc(Counter, usize),
    /// Go to `zero` if the counter is 0, else decrement it and go to `nonzero`.
    TestDec {
        counter: Counter,
        zero: usize,
        nonzero: usize,
    },
    Halt,
}

/// States are numbered in declaration order; state 0 is initial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterMachine {
    pub states: Vec<String>,
    pub program: Vec<Instruction>,
    pub halt: usize,
}

/// A finished or cut-off interpretation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineRun {
    /// Visited configurations `(state, c1, c2)`, the initial one first.
    pub trace: Vec<(usize, u64, u64)>,
    pub halted: bool,
}

impl MachineRun {
    /// Number of configurations, counting the initial and the halting one.
    pub fn length(&self) -> usize {
        self.trace.len()
    }

    pub fn max_counter(&self) -> u64 {
        self.trace
            .iter()
            .map(|&(_, a, b)| a.max(b))
            .max()
            .unwrap_or(0)
    }
}

fn err(line: usize, msg: impl Into<String>) -> GadgetError {
    GadgetError::Machine {
        line,
        msg: msg.into(),
    }
}

fn counter(tok: &str, line: usize) -> Result<Counter, GadgetError> {
    match tok {
        "c1" => Ok(Counter::C1),
        "c2" => Ok(Counter::C2),
        _ => Err(err(line, format!("unknown counter `{tok}`"))),
    }
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    // `__` is reserved for the locations the encodings add
    !s.contains("__")
        && cs
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl CounterMachine {
    /// Parses `state s; inc c1 goto t;`, `state s; tdec c2 zero t else u;`
    /// and `halt h;` statements; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, GadgetError> {
        // (statement, line) pairs
        let mut stmts = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let code = raw.split('#').next().unwrap_or("");
            for s in code.split(';') {
                let s = s.trim();
                if !s.is_empty() {
                    stmts.push((s.to_string(), i + 1));
                }
            }
        }
        let mut names: Vec<String> = Vec::new();
        let mut ids: BTreeMap<String, usize> = BTreeMap::new();
        let mut intern = |n: &str, line: usize| -> Result<usize, GadgetError> {
            if !valid_name(n) {
                return Err(err(line, format!("invalid state name `{n}`")));
            }
            Ok(*ids.entry(n.to_string()).or_insert_with(|| {
                names.push(n.to_string());
                names.len() - 1
            }))
        };
        let mut raw_program: Vec<(usize, Instruction, usize)> = Vec::new();
        let mut current: Option<(usize, usize)> = None;
        let mut halt = None;
        for (s, line) in stmts {
            let toks: Vec<&str> = s.split_whitespace().collect();
            match toks.as_slice() {
                ["state", name] => {
                    if let Some((_, l)) = current {
                        return Err(err(l, "state has no instruction"));
                    }
                    current = Some((intern(name, line)?, line));
                }
                ["halt", name] => {
                    if current.is_some() {
                        return Err(err(line, "halt inside a state block"));
                    }
                    if halt.is_some() {
                        return Err(err(line, "more than one halting state"));
                    }
                    let id = intern(name, line)?;
                    halt = Some(id);
                    raw_program.push((id, Instruction::Halt, line));
                }
                ["inc", c, "goto", target] => {
                    let (src, _) = current
                        .take()
                        .ok_or_else(|| err(line, "instruction outside a state"))?;
                    let instr = Instruction::Inc(counter(c, line)?, intern(target, line)?);
                    raw_program.push((src, instr, line));
                }
                ["tdec", c, "zero", z, "else", nz] => {
                    let (src, _) = current
                        .take()
                        .ok_or_else(|| err(line, "instruction outside a state"))?;
                    let instr = Instruction::TestDec {
                        counter: counter(c, line)?,
                        zero: intern(z, line)?,
                        nonzero: intern(nz, line)?,
                    };
                    raw_program.push((src, instr, line));
                }
                _ => return Err(err(line, format!("cannot parse `{s}`"))),
            }
        }
        if let Some((_, l)) = current {
            return Err(err(l, "state has no instruction"));
        }
        let halt = halt.ok_or_else(|| err(0, "no halting state"))?;
        let mut program: Vec<Option<Instruction>> = vec![None; names.len()];
        for (src, instr, line) in raw_program {
            if program[src].is_some() {
                return Err(err(
                    line,
                    format!("state `{}` has two instructions", names[src]),
                ));
            }
            program[src] = Some(instr);
        }
        let program = program
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| err(0, format!("state `{}` has no instruction", names[i])))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CounterMachine {
            states: names,
            program,
            halt,
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, instr) in self.program.iter().enumerate() {
            let s = &self.states[i];
            let _ = match instr {
                Instruction::Halt => writeln!(out, "halt {s};"),
                Instruction::Inc(c, t) => {
                    writeln!(out, "state {s}; inc {} goto {};", c.name(), self.states[*t])
                }
                Instruction::TestDec {
                    counter,
                    zero,
                    nonzero,
                } => writeln!(
                    out,
                    "state {s}; tdec {} zero {} else {};",
                    counter.name(),
                    self.states[*zero],
                    self.states[*nonzero]
                ),
            };
        }
        out
    }

    pub fn initial(&self) -> usize {
        0
    }

    /// Runs for at most `max_steps` transitions.
    pub fn simulate(&self, max_steps: usize) -> MachineRun {
        let (mut s, mut c) = (self.initial(), [0u64; 2]);
        let mut trace = vec![(s, 0, 0)];
        for _ in 0..max_steps {
            match &self.program[s] {
                Instruction::Halt => break,
                Instruction::Inc(k, t) => {
                    c[k.index()] += 1;
                    s = *t;
                }
                Instruction::TestDec {
                    counter,
                    zero,
                    nonzero,
                } => {
                    if c[counter.index()] == 0 {
                        s = *zero;
                    } else {
                        c[counter.index()] -= 1;
                        s = *nonzero;
                    }
                }
            }
            trace.push((s, c[0], c[1]));
        }
        MachineRun {
            halted: s == self.halt,
            trace,
        }
    }
}
