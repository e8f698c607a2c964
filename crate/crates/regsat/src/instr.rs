//! Alternating register automata: instruction grammar, normalization of
//! positive boolean transition formulas into one instruction per state, and
//! the shared text format for word (`ara`) and tree (`atra`) automata.
//!
//! Word automata and tree automata share one representation: a word is
//! walked with `Next` moves only, a tree with `Down` (leftmost child) and
//! `Next` (next sibling to the right) moves.

use crate::model::Label;
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

pub type StateId = u32;
pub type LabelId = u16;

/// Which structures the automaton runs on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Word,
    Tree,
}

/// Move direction: `Down` = leftmost child (trees only), `Next` = next
/// position (words) or next sibling to the right (trees).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum MoveDir {
    Down,
    Next,
}

/// A type test against the current position's type flags.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum TypeTest {
    /// `child?` (true) / `nochild?` (false); trees only.
    Child(bool),
    /// `next?`/`end?` on words, `right?`/`noright?` on trees.
    Next(bool),
}

/// One atomic instruction, as produced by normalization.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Instr {
    Letter(LabelId),
    NotLetter(LabelId),
    Type(TypeTest),
    Store(StateId),
    Eq,
    NotEq,
    /// Ordered: current datum < register.
    TestLt,
    /// Ordered: current datum > register.
    TestGt,
    TestEq,
    TestNeq,
    And(StateId, StateId),
    Or(StateId, StateId),
    Move(MoveDir, StateId),
    Guess(StateId),
    Spread2(StateId, StateId),
    Spread1(StateId),
}

impl Instr {
    pub fn is_move(&self) -> bool {
        matches!(self, Instr::Move(..))
    }

    pub fn is_spread(&self) -> bool {
        matches!(self, Instr::Spread1(_) | Instr::Spread2(..))
    }

    /// Instructions that may introduce new data values or new obligations
    /// into a configuration. A spread must wait for these to resolve.
    pub fn blocks_spread(&self) -> bool {
        matches!(
            self,
            Instr::Store(_) | Instr::Guess(_) | Instr::And(..) | Instr::Or(..)
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("reference to undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("ordered test in unordered automaton")]
    OrderedTestInUnordered,
    #[error("`{0}` is not available in word automata")]
    TreeInstrInWordAutomaton(String),
    #[error("letter `{0}` is not in the declared alphabet")]
    UnknownLetter(String),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("duplicate transition for state `{0}`")]
    DuplicateState(String),
    #[error("state `{0}` has no transition (delta must be total)")]
    MissingTransition(String),
    #[error("automata kinds or ordered flags differ")]
    ModeMismatch,
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

/// A positive boolean transition formula, the input language of
/// [`RawAutomaton::normalize`]. Negation occurs only inside `NotLetter`
/// and the test complements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum F {
    True,
    False,
    Letter(Label),
    NotLetter(Label),
    Type(TypeTest),
    Eq,
    NotEq,
    TestLt,
    TestGt,
    TestEq,
    TestNeq,
    Store(Box<F>),
    Guess(Box<F>),
    Move(MoveDir, Box<F>),
    Spread2(String, Box<F>),
    Spread1(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Ref(String),
}

impl F {
    pub fn and(a: F, b: F) -> F {
        F::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: F, b: F) -> F {
        F::Or(Box::new(a), Box::new(b))
    }
    pub fn store(a: F) -> F {
        F::Store(Box::new(a))
    }
    pub fn guess(a: F) -> F {
        F::Guess(Box::new(a))
    }
    pub fn mv(d: MoveDir, a: F) -> F {
        F::Move(d, Box::new(a))
    }
    pub fn r(name: &str) -> F {
        F::Ref(name.to_string())
    }
    pub fn all(mut fs: Vec<F>) -> F {
        match fs.len() {
            0 => F::True,
            1 => fs.pop().unwrap(),
            _ => {
                let first = fs.remove(0);
                F::and(first, F::all(fs))
            }
        }
    }
    pub fn any(mut fs: Vec<F>) -> F {
        match fs.len() {
            0 => F::False,
            1 => fs.pop().unwrap(),
            _ => {
                let first = fs.remove(0);
                F::or(first, F::any(fs))
            }
        }
    }
}

/// An automaton before normalization: each declared state maps to a
/// positive boolean formula over instruction atoms.
#[derive(Clone, Debug)]
pub struct RawAutomaton {
    pub kind: Kind,
    pub ordered: bool,
    pub alphabet: Vec<Label>,
    pub initial: String,
    pub rules: Vec<(String, F)>,
}

/// A normalized automaton: `delta` is total and every entry is a single
/// instruction of the grammar.
#[derive(Clone, Debug)]
pub struct Automaton {
    pub kind: Kind,
    pub ordered: bool,
    pub alphabet: Vec<Label>,
    pub initial: StateId,
    names: Vec<String>,
    delta: Vec<Instr>,
    /// For every state, the declared state whose formula it serves. A
    /// `spread(q, _)` collects the threads sitting anywhere inside `q`'s
    /// formula, so matching goes through this table.
    owner: Vec<StateId>,
}

impl Automaton {
    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn instr(&self, s: StateId) -> Instr {
        self.delta[s as usize]
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s as usize]
    }

    pub fn label(&self, l: LabelId) -> &Label {
        &self.alphabet[l as usize]
    }

    pub fn label_id(&self, l: &Label) -> Option<LabelId> {
        self.alphabet.iter().position(|x| x == l).map(|i| i as LabelId)
    }

    /// Whether a thread in state `s` is collected by `spread(target, _)`.
    pub fn spread_matches(&self, target: StateId, s: StateId) -> bool {
        s == target || self.owner[s as usize] == target
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        0..self.delta.len() as StateId
    }
}

impl RawAutomaton {
    /// Introduces fresh auxiliary states so that every transition is a
    /// single grammar production. The language is preserved and the output
    /// size is linear in the input formula size.
    pub fn normalize(&self) -> Result<Automaton, AutomatonError> {
        if self.alphabet.is_empty() {
            return Err(AutomatonError::EmptyAlphabet);
        }
        let mut names: Vec<String> = Vec::new();
        let mut by_name: HashMap<String, StateId> = HashMap::new();
        for (name, _) in &self.rules {
            if by_name.insert(name.clone(), names.len() as StateId).is_some() {
                return Err(AutomatonError::DuplicateState(name.clone()));
            }
            names.push(name.clone());
        }
        let initial = *by_name
            .get(&self.initial)
            .ok_or_else(|| AutomatonError::UndeclaredState(self.initial.clone()))?;

        let mut b = Builder {
            kind: self.kind,
            ordered: self.ordered,
            alphabet: &self.alphabet,
            by_name: &by_name,
            names,
            delta: vec![None; self.rules.len()],
            owner: (0..self.rules.len() as StateId).collect(),
            fresh_counter: 0,
        };
        for (i, (_, f)) in self.rules.iter().enumerate() {
            let instr = b.compile_node(f, i as StateId)?;
            b.delta[i] = Some(instr);
        }
        let Builder {
            names,
            delta,
            owner,
            ..
        } = b;
        let delta: Vec<Instr> = delta
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.ok_or_else(|| AutomatonError::MissingTransition(names[i].clone())))
            .collect::<Result<_, _>>()?;
        Ok(Automaton {
            kind: self.kind,
            ordered: self.ordered,
            alphabet: self.alphabet.clone(),
            initial,
            names,
            delta,
            owner,
        })
    }
}

struct Builder<'a> {
    kind: Kind,
    ordered: bool,
    alphabet: &'a [Label],
    by_name: &'a HashMap<String, StateId>,
    names: Vec<String>,
    delta: Vec<Option<Instr>>,
    owner: Vec<StateId>,
    fresh_counter: usize,
}

impl Builder<'_> {
    fn fresh(&mut self, owner: StateId, instr: Instr) -> StateId {
        let name = loop {
            let cand = format!("s{}", self.fresh_counter);
            self.fresh_counter += 1;
            if !self.by_name.contains_key(&cand) && !self.names.contains(&cand) {
                break cand;
            }
        };
        let id = self.names.len() as StateId;
        self.names.push(name);
        self.delta.push(Some(instr));
        self.owner.push(owner);
        id
    }

    fn resolve(&self, name: &str) -> Result<StateId, AutomatonError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| AutomatonError::UndeclaredState(name.to_string()))
    }

    fn label_id(&self, l: &Label) -> Result<LabelId, AutomatonError> {
        self.alphabet
            .iter()
            .position(|x| x == l)
            .map(|i| i as LabelId)
            .ok_or_else(|| AutomatonError::UnknownLetter(l.as_str().to_string()))
    }

    fn check_tests(&self, f: &F) -> Result<(), AutomatonError> {
        match f {
            F::TestLt | F::TestGt | F::TestEq | F::TestNeq if !self.ordered => {
                Err(AutomatonError::OrderedTestInUnordered)
            }
            F::Move(MoveDir::Down, _) if self.kind == Kind::Word => Err(
                AutomatonError::TreeInstrInWordAutomaton("down".to_string()),
            ),
            F::Type(TypeTest::Child(_)) if self.kind == Kind::Word => Err(
                AutomatonError::TreeInstrInWordAutomaton("child?/nochild?".to_string()),
            ),
            _ => Ok(()),
        }
    }

    /// Compiles a formula node into a single instruction. `owner` is the
    /// declared state whose formula is being compiled; all fresh states
    /// allocated here belong to it.
    fn compile_node(&mut self, f: &F, owner: StateId) -> Result<Instr, AutomatonError> {
        self.check_tests(f)?;
        Ok(match f {
            F::True => {
                let a = self.fresh(owner, Instr::Type(TypeTest::Next(true)));
                let b = self.fresh(owner, Instr::Type(TypeTest::Next(false)));
                Instr::Or(a, b)
            }
            F::False => {
                let a = self.fresh(owner, Instr::Type(TypeTest::Next(true)));
                let b = self.fresh(owner, Instr::Type(TypeTest::Next(false)));
                Instr::And(a, b)
            }
            F::Letter(l) => Instr::Letter(self.label_id(l)?),
            F::NotLetter(l) => Instr::NotLetter(self.label_id(l)?),
            F::Type(t) => Instr::Type(*t),
            // In ordered automata the equality tests are the ordered
            // test variants of the same semantics.
            F::Eq => {
                if self.ordered {
                    Instr::TestEq
                } else {
                    Instr::Eq
                }
            }
            F::NotEq => {
                if self.ordered {
                    Instr::TestNeq
                } else {
                    Instr::NotEq
                }
            }
            F::TestLt => Instr::TestLt,
            F::TestGt => Instr::TestGt,
            F::TestEq => Instr::TestEq,
            F::TestNeq => Instr::TestNeq,
            F::Store(inner) => Instr::Store(self.compile_sub(inner, owner)?),
            F::Guess(inner) => Instr::Guess(self.compile_sub(inner, owner)?),
            F::Move(d, inner) => Instr::Move(*d, self.compile_sub(inner, owner)?),
            F::Spread2(q, inner) => {
                Instr::Spread2(self.resolve(q)?, self.compile_sub(inner, owner)?)
            }
            F::Spread1(inner) => Instr::Spread1(self.compile_sub(inner, owner)?),
            F::And(a, b) => Instr::And(self.compile_sub(a, owner)?, self.compile_sub(b, owner)?),
            F::Or(a, b) => Instr::Or(self.compile_sub(a, owner)?, self.compile_sub(b, owner)?),
            F::Ref(q) => {
                // A bare goto has no grammar production of its own.
                let t = self.resolve(q)?;
                Instr::Or(t, t)
            }
        })
    }

    /// Compiles a sub-formula to a state id, allocating a fresh owned state
    /// unless the formula is a bare state reference.
    fn compile_sub(&mut self, f: &F, owner: StateId) -> Result<StateId, AutomatonError> {
        if let F::Ref(q) = f {
            return self.resolve(q);
        }
        let id = self.fresh(owner, Instr::Eq); // placeholder, overwritten below
        let instr = self.compile_node(f, owner)?;
        self.delta[id as usize] = Some(instr);
        Ok(id)
    }
}

/// Disjoint union of two automata with a fresh initial state combining the
/// originals by `Or` (union) or `And` (intersection).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CombineMode {
    Union,
    Intersection,
}

pub fn combine(
    a: &Automaton,
    b: &Automaton,
    mode: CombineMode,
) -> Result<Automaton, AutomatonError> {
    if a.kind != b.kind || a.ordered != b.ordered {
        return Err(AutomatonError::ModeMismatch);
    }
    let mut alphabet = a.alphabet.clone();
    for l in &b.alphabet {
        if !alphabet.contains(l) {
            alphabet.push(l.clone());
        }
    }
    alphabet.sort();
    let relabel = |aut: &Automaton, l: LabelId| -> LabelId {
        alphabet
            .iter()
            .position(|x| x == aut.label(l))
            .expect("merged alphabet") as LabelId
    };

    let mut names = vec!["u0".to_string()];
    let mut delta = vec![Instr::Eq]; // placeholder for the fresh initial
    let mut owner = vec![0];
    let offs_a = 1u32;
    for s in a.state_ids() {
        names.push(format!("a_{}", a.state_name(s)));
        delta.push(shift(a.instr(s), offs_a, |l| relabel(a, l)));
        owner.push(a.owner[s as usize] + offs_a);
    }
    let offs_b = 1 + a.state_count() as u32;
    for s in b.state_ids() {
        names.push(format!("b_{}", b.state_name(s)));
        delta.push(shift(b.instr(s), offs_b, |l| relabel(b, l)));
        owner.push(b.owner[s as usize] + offs_b);
    }
    delta[0] = match mode {
        CombineMode::Union => Instr::Or(a.initial + offs_a, b.initial + offs_b),
        CombineMode::Intersection => Instr::And(a.initial + offs_a, b.initial + offs_b),
    };
    Ok(Automaton {
        kind: a.kind,
        ordered: a.ordered,
        alphabet,
        initial: 0,
        names,
        delta,
        owner,
    })
}

fn shift(i: Instr, by: u32, relabel: impl Fn(LabelId) -> LabelId) -> Instr {
    match i {
        Instr::Letter(l) => Instr::Letter(relabel(l)),
        Instr::NotLetter(l) => Instr::NotLetter(relabel(l)),
        Instr::Type(t) => Instr::Type(t),
        Instr::Store(q) => Instr::Store(q + by),
        Instr::Eq => Instr::Eq,
        Instr::NotEq => Instr::NotEq,
        Instr::TestLt => Instr::TestLt,
        Instr::TestGt => Instr::TestGt,
        Instr::TestEq => Instr::TestEq,
        Instr::TestNeq => Instr::TestNeq,
        Instr::And(p, q) => Instr::And(p + by, q + by),
        Instr::Or(p, q) => Instr::Or(p + by, q + by),
        Instr::Move(d, q) => Instr::Move(d, q + by),
        Instr::Guess(q) => Instr::Guess(q + by),
        Instr::Spread2(p, q) => Instr::Spread2(p + by, q + by),
        Instr::Spread1(q) => Instr::Spread1(q + by),
    }
}

const KEYWORDS: &[&str] = &[
    "ara", "atra", "ordered", "alphabet", "initial", "next", "down", "right", "end", "child",
    "nochild", "noright", "store", "guess", "spread", "eq", "neq", "lt", "gt", "true", "false",
];

pub fn is_reserved(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Parses the automaton text format:
///
/// ```text
/// ara [ordered] {
///   alphabet: a b;
///   initial: q0;
///   q0 := store(q1);
///   q1 := (a & next q2) | eq;
/// }
/// ```
///
/// Tree automata start with `atra`, use moves `down q` / `right q` and
/// type tests `child?`, `nochild?`, `right?`, `noright?`.
pub fn parse_automaton(text: &str) -> Result<Automaton, AutomatonError> {
    let raw = parse_raw_automaton(text)?;
    raw.normalize()
}

pub fn parse_raw_automaton(text: &str) -> Result<RawAutomaton, AutomatonError> {
    let mut s = crate::model::text::Scanner::new(text);
    let to_err = |e: crate::model::ParseError| match e {
        crate::model::ParseError::Syntax { line, col, msg } => {
            AutomatonError::Parse { line, col, msg }
        }
        other => AutomatonError::Parse {
            line: 0,
            col: 0,
            msg: other.to_string(),
        },
    };
    let kind = if s.eat_keyword("ara") {
        Kind::Word
    } else if s.eat_keyword("atra") {
        Kind::Tree
    } else {
        return Err(to_err(s.error("expected `ara` or `atra`")));
    };
    let ordered = s.eat_keyword("ordered");
    s.skip_ws();
    s.expect(b'{').map_err(to_err)?;
    if !s.eat_keyword("alphabet") {
        return Err(to_err(s.error("expected `alphabet:`")));
    }
    s.skip_ws();
    s.expect(b':').map_err(to_err)?;
    let mut alphabet = Vec::new();
    loop {
        s.skip_ws();
        if s.eat(b';') {
            break;
        }
        let l = s.ident().map_err(to_err)?;
        if is_reserved(&l) {
            return Err(to_err(s.error(format!("`{l}` is a reserved word"))));
        }
        alphabet.push(Label::new(&l));
    }
    if !s.eat_keyword("initial") {
        return Err(to_err(s.error("expected `initial:`")));
    }
    s.skip_ws();
    s.expect(b':').map_err(to_err)?;
    s.skip_ws();
    let initial = s.ident().map_err(to_err)?;
    s.skip_ws();
    s.expect(b';').map_err(to_err)?;
    let mut rules = Vec::new();
    loop {
        s.skip_ws();
        if s.eat(b'}') {
            break;
        }
        let name = s.ident().map_err(to_err)?;
        if is_reserved(&name) {
            return Err(to_err(s.error(format!("`{name}` is a reserved word"))));
        }
        s.skip_ws();
        s.expect(b':').map_err(to_err)?;
        s.expect(b'=').map_err(to_err)?;
        let f = parse_formula(&mut s, &alphabet).map_err(to_err)?;
        s.skip_ws();
        s.expect(b';').map_err(to_err)?;
        rules.push((name, f));
    }
    Ok(RawAutomaton {
        kind,
        ordered,
        alphabet,
        initial,
        rules,
    })
}

type PResult = Result<F, crate::model::ParseError>;

fn parse_formula(s: &mut crate::model::text::Scanner, alphabet: &[Label]) -> PResult {
    let mut lhs = parse_conj(s, alphabet)?;
    loop {
        s.skip_ws();
        if s.eat(b'|') {
            let rhs = parse_conj(s, alphabet)?;
            lhs = F::or(lhs, rhs);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_conj(s: &mut crate::model::text::Scanner, alphabet: &[Label]) -> PResult {
    let mut lhs = parse_atom(s, alphabet)?;
    loop {
        s.skip_ws();
        if s.eat(b'&') {
            let rhs = parse_atom(s, alphabet)?;
            lhs = F::and(lhs, rhs);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_atom(s: &mut crate::model::text::Scanner, alphabet: &[Label]) -> PResult {
    s.skip_ws();
    if s.eat(b'(') {
        let f = parse_formula(s, alphabet)?;
        s.skip_ws();
        s.expect(b')')?;
        return Ok(f);
    }
    if s.eat(b'!') {
        s.skip_ws();
        let l = s.ident()?;
        return Ok(F::NotLetter(Label::new(&l)));
    }
    if s.eat_keyword("true") {
        return Ok(F::True);
    }
    if s.eat_keyword("false") {
        return Ok(F::False);
    }
    if s.eat_keyword("eq") {
        return Ok(F::Eq);
    }
    if s.eat_keyword("neq") {
        return Ok(F::NotEq);
    }
    if s.eat_keyword("lt") {
        return Ok(F::TestLt);
    }
    if s.eat_keyword("gt") {
        return Ok(F::TestGt);
    }
    if s.eat_keyword("store") {
        s.skip_ws();
        s.expect(b'(')?;
        let f = parse_formula(s, alphabet)?;
        s.skip_ws();
        s.expect(b')')?;
        return Ok(F::store(f));
    }
    if s.eat_keyword("guess") {
        s.skip_ws();
        s.expect(b'(')?;
        let f = parse_formula(s, alphabet)?;
        s.skip_ws();
        s.expect(b')')?;
        return Ok(F::guess(f));
    }
    if s.eat_keyword("spread") {
        s.skip_ws();
        s.expect(b'(')?;
        let first = parse_formula(s, alphabet)?;
        s.skip_ws();
        if s.eat(b',') {
            let second = parse_formula(s, alphabet)?;
            s.skip_ws();
            s.expect(b')')?;
            let q = match first {
                F::Ref(q) => q,
                F::Letter(l) => l.as_str().to_string(),
                _ => return Err(s.error("spread(q, q'): first argument must be a state")),
            };
            return Ok(F::Spread2(q, Box::new(second)));
        }
        s.expect(b')')?;
        return Ok(F::Spread1(Box::new(first)));
    }
    if s.eat_keyword("end") {
        s.skip_ws();
        s.expect(b'?')?;
        return Ok(F::Type(TypeTest::Next(false)));
    }
    if s.eat_keyword("next") {
        s.skip_ws();
        if s.eat(b'?') {
            return Ok(F::Type(TypeTest::Next(true)));
        }
        let f = parse_atom(s, alphabet)?;
        return Ok(F::mv(MoveDir::Next, f));
    }
    if s.eat_keyword("right") {
        s.skip_ws();
        if s.eat(b'?') {
            return Ok(F::Type(TypeTest::Next(true)));
        }
        let f = parse_atom(s, alphabet)?;
        return Ok(F::mv(MoveDir::Next, f));
    }
    if s.eat_keyword("noright") {
        s.skip_ws();
        s.expect(b'?')?;
        return Ok(F::Type(TypeTest::Next(false)));
    }
    if s.eat_keyword("child") {
        s.skip_ws();
        s.expect(b'?')?;
        return Ok(F::Type(TypeTest::Child(true)));
    }
    if s.eat_keyword("nochild") {
        s.skip_ws();
        s.expect(b'?')?;
        return Ok(F::Type(TypeTest::Child(false)));
    }
    if s.eat_keyword("down") {
        s.skip_ws();
        let f = parse_atom(s, alphabet)?;
        return Ok(F::mv(MoveDir::Down, f));
    }
    let name = s.ident()?;
    if alphabet.iter().any(|l| l.as_str() == name) {
        Ok(F::Letter(Label::new(&name)))
    } else {
        Ok(F::Ref(name))
    }
}

/// Serializes a normalized automaton back into the text format. The output
/// re-parses to an automaton with the same language.
pub fn serialize_automaton(aut: &Automaton) -> String {
    let mut out = String::new();
    let head = match aut.kind {
        Kind::Word => "ara",
        Kind::Tree => "atra",
    };
    let _ = write!(out, "{head}");
    if aut.ordered {
        out.push_str(" ordered");
    }
    out.push_str(" {\n  alphabet:");
    for l in &aut.alphabet {
        let _ = write!(out, " {l}");
    }
    out.push_str(";\n");
    let _ = writeln!(out, "  initial: {};", aut.state_name(aut.initial));
    for s in aut.state_ids() {
        let _ = writeln!(out, "  {} := {};", aut.state_name(s), instr_text(aut, s));
    }
    out.push_str("}\n");
    out
}

fn instr_text(aut: &Automaton, s: StateId) -> String {
    let n = |q: StateId| aut.state_name(q).to_string();
    match aut.instr(s) {
        Instr::Letter(l) => aut.label(l).to_string(),
        Instr::NotLetter(l) => format!("!{}", aut.label(l)),
        Instr::Type(TypeTest::Next(true)) => match aut.kind {
            Kind::Word => "next?".to_string(),
            Kind::Tree => "right?".to_string(),
        },
        Instr::Type(TypeTest::Next(false)) => match aut.kind {
            Kind::Word => "end?".to_string(),
            Kind::Tree => "noright?".to_string(),
        },
        Instr::Type(TypeTest::Child(true)) => "child?".to_string(),
        Instr::Type(TypeTest::Child(false)) => "nochild?".to_string(),
        Instr::Store(q) => format!("store({})", n(q)),
        Instr::Eq | Instr::TestEq => "eq".to_string(),
        Instr::NotEq | Instr::TestNeq => "neq".to_string(),
        Instr::TestLt => "lt".to_string(),
        Instr::TestGt => "gt".to_string(),
        Instr::And(p, q) => format!("{} & {}", n(p), n(q)),
        Instr::Or(p, q) => format!("{} | {}", n(p), n(q)),
        Instr::Move(MoveDir::Next, q) => match aut.kind {
            Kind::Word => format!("next {}", n(q)),
            Kind::Tree => format!("right {}", n(q)),
        },
        Instr::Move(MoveDir::Down, q) => format!("down {}", n(q)),
        Instr::Guess(q) => format!("guess({})", n(q)),
        Instr::Spread2(p, q) => format!("spread({}, {})", n(p), n(q)),
        Instr::Spread1(q) => format!("spread({})", n(q)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lbl(s: &str) -> Label {
        Label::new(s)
    }

    #[test]
    fn normalize_flattens_nested_formula() {
        // q0 := (a & next q1) | eq
        let raw = RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![lbl("a")],
            initial: "q0".to_string(),
            rules: vec![
                (
                    "q0".to_string(),
                    F::or(
                        F::and(F::Letter(lbl("a")), F::mv(MoveDir::Next, F::r("q1"))),
                        F::Eq,
                    ),
                ),
                ("q1".to_string(), F::Eq),
            ],
        };
        let aut = raw.normalize().unwrap();
        assert!(matches!(aut.instr(aut.initial), Instr::Or(..)));
        // Every entry is a single production; fresh states carry q0 as owner.
        for s in aut.state_ids() {
            let _ = aut.instr(s);
        }
        assert!(aut.state_count() > 2);
    }

    #[test]
    fn normalize_atomic_unchanged() {
        let raw = RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![lbl("a")],
            initial: "q0".to_string(),
            rules: vec![("q0".to_string(), F::Eq)],
        };
        let aut = raw.normalize().unwrap();
        assert_eq!(aut.state_count(), 1);
        assert_eq!(aut.instr(0), Instr::Eq);
    }

    #[test]
    fn normalize_rejects_undeclared_state() {
        let raw = RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![lbl("a")],
            initial: "q0".to_string(),
            rules: vec![("q0".to_string(), F::r("nope"))],
        };
        assert_eq!(
            raw.normalize().unwrap_err(),
            AutomatonError::UndeclaredState("nope".to_string())
        );
    }

    #[test]
    fn normalize_rejects_ordered_test_in_unordered() {
        let raw = RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![lbl("a")],
            initial: "q0".to_string(),
            rules: vec![("q0".to_string(), F::TestLt)],
        };
        assert_eq!(
            raw.normalize().unwrap_err(),
            AutomatonError::OrderedTestInUnordered
        );
    }

    #[test]
    fn spread_owner_matching_covers_fresh_states() {
        // qa := end? | next qa — spread(qa, _) must match the fresh states
        // compiled out of qa's disjunction.
        let raw = RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![lbl("a")],
            initial: "q0".to_string(),
            rules: vec![
                (
                    "q0".to_string(),
                    F::Spread2("qa".to_string(), Box::new(F::r("q1"))),
                ),
                (
                    "qa".to_string(),
                    F::or(
                        F::Type(TypeTest::Next(false)),
                        F::mv(MoveDir::Next, F::r("qa")),
                    ),
                ),
                ("q1".to_string(), F::NotEq),
            ],
        };
        let aut = raw.normalize().unwrap();
        let qa = aut.state_ids().find(|&s| aut.state_name(s) == "qa").unwrap();
        let matched: Vec<StateId> = aut
            .state_ids()
            .filter(|&s| aut.spread_matches(qa, s))
            .collect();
        // qa itself plus its two fresh disjunct states.
        assert_eq!(matched.len(), 3);
    }

    #[test]
    fn format_parses_and_round_trips() {
        let text = "ara {\n  alphabet: a b;\n  initial: q0;\n  q0 := store(q1);\n  q1 := (a & next q2) | eq; # comment\n  q2 := end? | b;\n}\n";
        let aut = parse_automaton(text).unwrap();
        assert_eq!(aut.alphabet.len(), 2);
        let text2 = serialize_automaton(&aut);
        let aut2 = parse_automaton(&text2).unwrap();
        assert_eq!(aut2.state_count(), aut.state_count());
        assert_eq!(serialize_automaton(&aut2), text2);
    }

    #[test]
    fn format_parses_atra_tokens() {
        let text = "atra {\n  alphabet: a;\n  initial: q0;\n  q0 := (child? & down q1) | nochild?;\n  q1 := right q0 | noright?;\n}\n";
        let aut = parse_automaton(text).unwrap();
        assert_eq!(aut.kind, Kind::Tree);
        let text2 = serialize_automaton(&aut);
        assert_eq!(
            parse_automaton(&text2).unwrap().state_count(),
            aut.state_count()
        );
    }

    #[test]
    fn format_ordered_flag_switches_tests() {
        let text = "ara ordered {\n  alphabet: a;\n  initial: q0;\n  q0 := lt | gt | eq | neq;\n}\n";
        let aut = parse_automaton(text).unwrap();
        assert!(aut.ordered);
        // eq/neq in an ordered automaton are the ordered test variants.
        let has = |i: Instr| aut.state_ids().any(|s| aut.instr(s) == i);
        assert!(has(Instr::TestLt) && has(Instr::TestGt) && has(Instr::TestEq) && has(Instr::TestNeq));
    }
}
