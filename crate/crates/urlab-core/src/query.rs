//! Evaluable homomorphism-closed query classes and satisfaction testing.
//!
//! Two variants are supported: unions of conjunctive queries, and regular
//! path queries (one-way or two-way) whose regex operators are limited to
//! concatenation, alternation, star and plus — no negation or complement,
//! which would break homomorphism closure. Both variants are monotone.
//!
//! A [`Matcher`] compiles a query against a fixed instance and evaluates
//! subsets of its facts given as bitmasks, which is the hot path of every
//! enumeration kernel.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::instance::{scan_ident, Elem, Fact, Instance, Relation};

/// A query variable, scoped to the query it appears in.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Var(pub String);

/// One atom `R(x,y)` of a conjunct; unary surface atoms `R(x)` are stored
/// as `R(x,x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub rel: Relation,
    pub x: Var,
    pub y: Var,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.rel, self.x.0, self.y.0)
    }
}

/// Regular expression over relation symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    Letter(Relation),
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(alloc::boxed::Box<Regex>),
    Plus(alloc::boxed::Box<Regex>),
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Letter(r) => write!(f, "{r}"),
            Regex::Concat(parts) => {
                let mut first = true;
                for p in parts {
                    if !first {
                        write!(f, " . ")?;
                    }
                    first = false;
                    if matches!(p, Regex::Alt(_)) {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            Regex::Alt(parts) => {
                let mut first = true;
                for p in parts {
                    if !first {
                        write!(f, " | ")?;
                    }
                    first = false;
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            Regex::Star(inner) => match **inner {
                Regex::Letter(_) => write!(f, "{inner}*"),
                _ => write!(f, "({inner})*"),
            },
            Regex::Plus(inner) => match **inner {
                Regex::Letter(_) => write!(f, "{inner}+"),
                _ => write!(f, "({inner})+"),
            },
        }
    }
}

/// A regular path query: a regex over relation symbols, a direction mode,
/// and optional endpoint tags that must hold as unary facts on the path's
/// ends. Two-way mode treats every relation as traversable in both
/// directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rpq {
    pub regex: Regex,
    pub two_way: bool,
    pub start_tag: Option<Relation>,
    pub end_tag: Option<Relation>,
}

/// Query AST. Every value of this type is homomorphism-closed and monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Ucq(Vec<Vec<Atom>>),
    Rpq(Rpq),
}

/// Boundedness metadata. The hint never influences evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundednessHint {
    Bounded,
    Unbounded,
    #[default]
    Unknown,
}

/// An evaluable homomorphism-closed query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub kind: QueryKind,
    pub hint: BoundednessHint,
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            QueryKind::Ucq(disjuncts) => {
                write!(f, "ucq: ")?;
                let mut first_d = true;
                for d in disjuncts {
                    if !first_d {
                        write!(f, " | ")?;
                    }
                    first_d = false;
                    let mut first_a = true;
                    for a in d {
                        if !first_a {
                            write!(f, ",")?;
                        }
                        first_a = false;
                        write!(f, "{a}")?;
                    }
                }
                Ok(())
            }
            QueryKind::Rpq(rpq) => {
                let mut opts: Vec<String> = Vec::new();
                if rpq.two_way {
                    opts.push("2way".to_owned());
                }
                if let Some(t) = &rpq.start_tag {
                    opts.push(format!("start={t}"));
                }
                if let Some(t) = &rpq.end_tag {
                    opts.push(format!("end={t}"));
                }
                if opts.is_empty() {
                    write!(f, "rpq: {}", rpq.regex)
                } else {
                    write!(f, "rpq[{}]: {}", opts.join(","), rpq.regex)
                }
            }
        }
    }
}

impl Query {
    pub fn ucq(disjuncts: Vec<Vec<Atom>>) -> Query {
        Query { kind: QueryKind::Ucq(disjuncts), hint: BoundednessHint::Bounded }
    }

    pub fn rpq(rpq: Rpq) -> Query {
        Query { kind: QueryKind::Rpq(rpq), hint: BoundednessHint::Unknown }
    }

    /// Parses the query DSL:
    ///
    /// ```text
    /// ucq: R(x,x),S(x,y),T(y,y) | A(x,x)
    /// rpq[2way]: R . S* . T
    /// rpq[start=R,end=T]: S+
    /// ```
    pub fn parse(text: &str) -> Result<Query> {
        Parser::new(text).parse_query()
    }

    /// Relations mentioned anywhere in the query (atoms, regex letters, tags).
    pub fn signature(&self) -> BTreeSet<Relation> {
        let mut sig = BTreeSet::new();
        match &self.kind {
            QueryKind::Ucq(ds) => {
                for d in ds {
                    for a in d {
                        sig.insert(a.rel.clone());
                    }
                }
            }
            QueryKind::Rpq(rpq) => {
                collect_letters(&rpq.regex, &mut sig);
                if let Some(t) = &rpq.start_tag {
                    sig.insert(t.clone());
                }
                if let Some(t) = &rpq.end_tag {
                    sig.insert(t.clone());
                }
            }
        }
        sig
    }

    /// Rewrites the query to match unary-encoded instances: UCQ atoms with
    /// equal variables get primed relations, and RPQ endpoint tags are
    /// primed (tags match only unary-encoded facts). Regex body letters are
    /// left alone: they traverse binary facts.
    pub fn encode_unary(&self) -> Query {
        let prime = |r: &Relation| Relation::new(format!("{r}'"));
        match &self.kind {
            QueryKind::Ucq(ds) => Query {
                kind: QueryKind::Ucq(
                    ds.iter()
                        .map(|d| {
                            d.iter()
                                .map(|a| Atom {
                                    rel: if a.x == a.y { prime(&a.rel) } else { a.rel.clone() },
                                    x: a.x.clone(),
                                    y: a.y.clone(),
                                })
                                .collect()
                        })
                        .collect(),
                ),
                hint: self.hint,
            },
            QueryKind::Rpq(rpq) => Query {
                kind: QueryKind::Rpq(Rpq {
                    regex: rpq.regex.clone(),
                    two_way: rpq.two_way,
                    start_tag: rpq.start_tag.as_ref().map(prime),
                    end_tag: rpq.end_tag.as_ref().map(prime),
                }),
                hint: self.hint,
            },
        }
    }

    /// True iff the instance is a model of the query.
    pub fn evaluate(&self, inst: &Instance) -> bool {
        Matcher::compile(self, inst).eval_all()
    }

    /// All subinstance-minimal models inside `inst`: satisfying subsets with
    /// no strict satisfying subset. By monotonicity, single-fact removals
    /// suffice to certify minimality.
    pub fn minimal_models_within(&self, inst: &Instance, cap: usize) -> Result<Vec<Instance>> {
        let subs = inst.subinstances(cap)?;
        let matcher = Matcher::compile(self, inst);
        let n = subs.fact_count() as u32;
        let mut out = Vec::new();
        for mask in 0..(1u64 << n) {
            if !matcher.eval_mask(mask) {
                continue;
            }
            let minimal = (0..n).all(|b| mask >> b & 1 == 0 || !matcher.eval_mask(mask & !(1 << b)));
            if minimal {
                out.push(subs.get(mask));
            }
        }
        Ok(out)
    }
}

fn collect_letters(r: &Regex, sig: &mut BTreeSet<Relation>) {
    match r {
        Regex::Letter(l) => {
            sig.insert(l.clone());
        }
        Regex::Concat(parts) | Regex::Alt(parts) => {
            for p in parts {
                collect_letters(p, sig);
            }
        }
        Regex::Star(inner) | Regex::Plus(inner) => collect_letters(inner, sig),
    }
}

// ---------------------------------------------------------------------------
// DSL parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Parser<'a> {
        Parser { src, pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: 0, pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(|c: char| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let end = scan_ident(self.src, self.pos).ok_or_else(|| self.err("expected identifier"))?;
        let s = &self.src[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn parse_query(&mut self) -> Result<Query> {
        self.skip_ws();
        if self.src[self.pos..].starts_with("ucq") {
            self.pos += 3;
            self.expect(':')?;
            let q = self.parse_ucq()?;
            self.end()?;
            Ok(q)
        } else if self.src[self.pos..].starts_with("rpq") {
            self.pos += 3;
            let mut two_way = false;
            let mut start_tag = None;
            let mut end_tag = None;
            self.skip_ws();
            if self.eat('[') {
                loop {
                    let opt = self.ident()?;
                    match opt {
                        "2way" => two_way = true,
                        "1way" => two_way = false,
                        "start" | "end" => {
                            self.expect('=')?;
                            let rel = Relation::new(self.ident()?);
                            if opt == "start" {
                                start_tag = Some(rel);
                            } else {
                                end_tag = Some(rel);
                            }
                        }
                        other => return Err(self.err(format!("unknown direction tag {other:?}"))),
                    }
                    self.skip_ws();
                    if self.eat(']') {
                        break;
                    }
                    if !self.eat(',') {
                        return Err(self.err("expected ',' or ']' in rpq options"));
                    }
                }
            }
            self.expect(':')?;
            let regex = self.parse_alt()?;
            self.end()?;
            Ok(Query::rpq(Rpq { regex, two_way, start_tag, end_tag }))
        } else {
            Err(self.err("expected 'ucq:' or 'rpq...:'"))
        }
    }

    fn end(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing characters"));
        }
        Ok(())
    }

    fn parse_ucq(&mut self) -> Result<Query> {
        let mut disjuncts = Vec::new();
        loop {
            let mut atoms = Vec::new();
            loop {
                atoms.push(self.parse_atom()?);
                self.skip_ws();
                if !self.eat(',') {
                    break;
                }
            }
            disjuncts.push(atoms);
            self.skip_ws();
            if !self.eat('|') {
                break;
            }
        }
        Ok(Query::ucq(disjuncts))
    }

    fn parse_atom(&mut self) -> Result<Atom> {
        let rel = Relation::new(self.ident()?);
        self.expect('(')?;
        let x = Var(self.ident()?.to_owned());
        self.skip_ws();
        let y = if self.eat(',') {
            Var(self.ident()?.to_owned())
        } else {
            x.clone()
        };
        self.expect(')')?;
        Ok(Atom { rel, x, y })
    }

    fn parse_alt(&mut self) -> Result<Regex> {
        let mut parts = vec![self.parse_seq()?];
        loop {
            self.skip_ws();
            if !self.eat('|') {
                break;
            }
            parts.push(self.parse_seq()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Regex::Alt(parts) })
    }

    fn parse_seq(&mut self) -> Result<Regex> {
        let mut parts = vec![self.parse_postfix()?];
        loop {
            self.skip_ws();
            if !self.eat('.') {
                break;
            }
            parts.push(self.parse_postfix()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Regex::Concat(parts) })
    }

    fn parse_postfix(&mut self) -> Result<Regex> {
        let mut r = self.parse_primary()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                r = Regex::Star(alloc::boxed::Box::new(r));
            } else if self.eat('+') {
                r = Regex::Plus(alloc::boxed::Box::new(r));
            } else {
                break;
            }
        }
        Ok(r)
    }

    fn parse_primary(&mut self) -> Result<Regex> {
        self.skip_ws();
        if self.eat('(') {
            let r = self.parse_alt()?;
            self.expect(')')?;
            Ok(r)
        } else {
            Ok(Regex::Letter(Relation::new(self.ident()?)))
        }
    }
}

// ---------------------------------------------------------------------------
// NFA (Thompson construction)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub(crate) struct Nfa {
    pub n: usize,
    pub start: usize,
    pub accept: usize,
    eps: Vec<Vec<usize>>,
    trans: Vec<Vec<(Relation, usize)>>,
    closure: Vec<Vec<usize>>,
}

impl Nfa {
    pub fn compile(regex: &Regex) -> Nfa {
        let mut b = NfaBuilder { eps: Vec::new(), trans: Vec::new() };
        let (start, accept) = b.build(regex);
        let n = b.eps.len();
        let mut nfa = Nfa { n, start, accept, eps: b.eps, trans: b.trans, closure: Vec::new() };
        nfa.closure = (0..n).map(|s| nfa.eps_closure(s)).collect();
        nfa
    }

    fn eps_closure(&self, s: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(t) = stack.pop() {
            for &u in &self.eps[t] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        (0..self.n).filter(|&i| seen[i]).collect()
    }

    pub fn closure_of(&self, s: usize) -> &[usize] {
        &self.closure[s]
    }

    pub fn transitions(&self, s: usize) -> &[(Relation, usize)] {
        &self.trans[s]
    }

    /// Distinct accepted words of length at most `max_len`, capped at
    /// `max_words` results.
    pub fn words_up_to(&self, max_len: usize, max_words: usize) -> Result<Vec<Vec<Relation>>> {
        let mut words: BTreeSet<Vec<Relation>> = BTreeSet::new();
        let mut frontier: BTreeMap<Vec<Relation>, BTreeSet<usize>> = BTreeMap::new();
        let start: BTreeSet<usize> = self.closure_of(self.start).iter().copied().collect();
        if start.contains(&self.accept) {
            words.insert(Vec::new());
        }
        frontier.insert(Vec::new(), start);
        for _ in 0..max_len {
            let mut next: BTreeMap<Vec<Relation>, BTreeSet<usize>> = BTreeMap::new();
            for (word, states) in &frontier {
                let mut by_letter: BTreeMap<Relation, BTreeSet<usize>> = BTreeMap::new();
                for &s in states {
                    for (rel, t) in self.transitions(s) {
                        by_letter
                            .entry(rel.clone())
                            .or_default()
                            .extend(self.closure_of(*t).iter().copied());
                    }
                }
                for (rel, targets) in by_letter {
                    let mut w = word.clone();
                    w.push(rel);
                    if targets.contains(&self.accept) {
                        words.insert(w.clone());
                        if words.len() > max_words {
                            return Err(Error::invalid(format!(
                                "regex word enumeration exceeded {max_words} words; reduce the search bound"
                            )));
                        }
                    }
                    next.entry(w).or_default().extend(targets);
                }
            }
            frontier = next;
        }
        Ok(words.into_iter().collect())
    }
}

struct NfaBuilder {
    eps: Vec<Vec<usize>>,
    trans: Vec<Vec<(Relation, usize)>>,
}

impl NfaBuilder {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.trans.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, r: &Regex) -> (usize, usize) {
        match r {
            Regex::Letter(rel) => {
                let a = self.state();
                let b = self.state();
                self.trans[a].push((rel.clone(), b));
                (a, b)
            }
            Regex::Concat(parts) => {
                let mut cur: Option<(usize, usize)> = None;
                for p in parts {
                    let (s, t) = self.build(p);
                    cur = Some(match cur {
                        None => (s, t),
                        Some((s0, t0)) => {
                            self.eps[t0].push(s);
                            (s0, t)
                        }
                    });
                }
                cur.unwrap_or_else(|| {
                    let a = self.state();
                    (a, a)
                })
            }
            Regex::Alt(parts) => {
                let a = self.state();
                let b = self.state();
                for p in parts {
                    let (s, t) = self.build(p);
                    self.eps[a].push(s);
                    self.eps[t].push(b);
                }
                (a, b)
            }
            Regex::Star(inner) => {
                let a = self.state();
                let b = self.state();
                let (s, t) = self.build(inner);
                self.eps[a].push(s);
                self.eps[a].push(b);
                self.eps[t].push(s);
                self.eps[t].push(b);
                (a, b)
            }
            Regex::Plus(inner) => {
                let (s, t) = self.build(inner);
                let a = self.state();
                let b = self.state();
                self.eps[a].push(s);
                self.eps[t].push(b);
                self.eps[t].push(s);
                (a, b)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Compiled matcher
// ---------------------------------------------------------------------------

/// A query compiled against a fixed instance; evaluates fact subsets given
/// as bitmasks over the instance's canonical fact order.
pub struct Matcher {
    n_facts: usize,
    kind: CompiledKind,
}

enum CompiledKind {
    Ucq {
        disjuncts: Vec<Vec<Atom>>,
        rel_facts: BTreeMap<Relation, Vec<usize>>,
        facts: Vec<Fact>,
    },
    Rpq {
        n_elems: usize,
        n_states: usize,
        nfa: Nfa,
        /// Per element: product moves `(other_elem, state_from, fact_idx, state_to)`
        /// precomputed against the NFA alphabet and direction mode.
        moves: Vec<Vec<(usize, usize, usize, usize)>>,
        /// Start-enabling slot per element: `None` = tag required but absent,
        /// `Some(None)` = no tag needed, `Some(Some(i))` = needs fact `i`.
        start_fact: Vec<Option<Option<usize>>>,
        end_fact: Vec<Option<Option<usize>>>,
    },
}

impl Matcher {
    pub fn compile(q: &Query, inst: &Instance) -> Matcher {
        let facts = inst.fact_vec();
        match &q.kind {
            QueryKind::Ucq(disjuncts) => {
                let mut rel_facts: BTreeMap<Relation, Vec<usize>> = BTreeMap::new();
                for (i, f) in facts.iter().enumerate() {
                    rel_facts.entry(f.rel.clone()).or_default().push(i);
                }
                Matcher {
                    n_facts: facts.len(),
                    kind: CompiledKind::Ucq {
                        disjuncts: disjuncts.iter().map(|d| reorder_atoms(d)).collect(),
                        rel_facts,
                        facts,
                    },
                }
            }
            QueryKind::Rpq(rpq) => {
                let nfa = Nfa::compile(&rpq.regex);
                let elems: Vec<Elem> = inst.dom().into_iter().collect();
                let idx: BTreeMap<Elem, usize> = elems.iter().cloned().zip(0..).collect();
                let n_elems = elems.len();
                let mut moves: Vec<Vec<(usize, usize, usize, usize)>> = vec![Vec::new(); n_elems];
                for (fi, f) in facts.iter().enumerate() {
                    let a = idx[&f.subject];
                    let b = idx[&f.object];
                    for s in 0..nfa.n {
                        for (rel, t) in nfa.transitions(s) {
                            if *rel != f.rel {
                                continue;
                            }
                            moves[a].push((b, s, fi, *t));
                            if rpq.two_way && a != b {
                                moves[b].push((a, s, fi, *t));
                            }
                        }
                    }
                }
                let tag_fact = |tag: &Option<Relation>, e: &Elem| -> Option<Option<usize>> {
                    match tag {
                        None => Some(None),
                        Some(rel) => {
                            let want = Fact { rel: rel.clone(), subject: e.clone(), object: e.clone() };
                            facts.iter().position(|f| *f == want).map(Some)
                        }
                    }
                };
                let start_fact = elems.iter().map(|e| tag_fact(&rpq.start_tag, e)).collect();
                let end_fact = elems.iter().map(|e| tag_fact(&rpq.end_tag, e)).collect();
                Matcher {
                    n_facts: facts.len(),
                    kind: CompiledKind::Rpq {
                        n_elems,
                        n_states: nfa.n,
                        nfa,
                        moves,
                        start_fact,
                        end_fact,
                    },
                }
            }
        }
    }

    pub fn eval_all(&self) -> bool {
        let mask = if self.n_facts >= 64 { u64::MAX } else { (1u64 << self.n_facts) - 1 };
        self.eval_mask(mask)
    }

    /// Evaluate the query on the subset of facts selected by `mask`.
    pub fn eval_mask(&self, mask: u64) -> bool {
        match &self.kind {
            CompiledKind::Ucq { disjuncts, rel_facts, facts } => disjuncts
                .iter()
                .any(|atoms| match_conjunct(atoms, rel_facts, facts, mask)),
            CompiledKind::Rpq { n_elems, n_states, nfa, moves, start_fact, end_fact } => {
                let tag_ok = |slot: &Option<Option<usize>>| -> bool {
                    match slot {
                        None => false,
                        Some(None) => true,
                        Some(Some(fi)) => mask >> fi & 1 == 1,
                    }
                };
                let mut visited = vec![false; n_elems * n_states];
                let mut stack: Vec<(usize, usize)> = Vec::new();
                for e in 0..*n_elems {
                    if !tag_ok(&start_fact[e]) {
                        continue;
                    }
                    for &s in nfa.closure_of(nfa.start) {
                        if !visited[e * n_states + s] {
                            visited[e * n_states + s] = true;
                            stack.push((e, s));
                        }
                    }
                }
                while let Some((e, s)) = stack.pop() {
                    if s == nfa.accept && tag_ok(&end_fact[e]) {
                        return true;
                    }
                    for &(other, from, fi, to) in &moves[e] {
                        if from != s || mask >> fi & 1 == 0 {
                            continue;
                        }
                        for &t in nfa.closure_of(to) {
                            if !visited[other * n_states + t] {
                                visited[other * n_states + t] = true;
                                stack.push((other, t));
                            }
                        }
                    }
                }
                false
            }
        }
    }
}

/// Static atom reordering: start from the first atom, then greedily pick the
/// atom sharing the most already-bound variables. Keeps the backtracking
/// join narrow on typical queries.
fn reorder_atoms(atoms: &[Atom]) -> Vec<Atom> {
    let mut remaining: Vec<Atom> = atoms.to_vec();
    let mut out: Vec<Atom> = Vec::new();
    let mut bound: BTreeSet<Var> = BTreeSet::new();
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let score = bound.contains(&a.x) as usize + bound.contains(&a.y) as usize;
                (i, score)
            })
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        let a = remaining.remove(pos);
        bound.insert(a.x.clone());
        bound.insert(a.y.clone());
        out.push(a);
    }
    out
}

fn match_conjunct(
    atoms: &[Atom],
    rel_facts: &BTreeMap<Relation, Vec<usize>>,
    facts: &[Fact],
    mask: u64,
) -> bool {
    let mut assign: BTreeMap<Var, Elem> = BTreeMap::new();
    match_from(atoms, 0, rel_facts, facts, mask, &mut assign)
}

fn match_from(
    atoms: &[Atom],
    depth: usize,
    rel_facts: &BTreeMap<Relation, Vec<usize>>,
    facts: &[Fact],
    mask: u64,
    assign: &mut BTreeMap<Var, Elem>,
) -> bool {
    let Some(atom) = atoms.get(depth) else {
        return true;
    };
    let Some(candidates) = rel_facts.get(&atom.rel) else {
        return false;
    };
    for &fi in candidates {
        if mask >> fi & 1 == 0 {
            continue;
        }
        let f = &facts[fi];
        if atom.x == atom.y && f.subject != f.object {
            continue;
        }
        let prev_x = assign.get(&atom.x).cloned();
        if let Some(v) = &prev_x {
            if *v != f.subject {
                continue;
            }
        }
        assign.insert(atom.x.clone(), f.subject.clone());
        let prev_y = assign.get(&atom.y).cloned();
        let y_ok = match &prev_y {
            Some(v) => *v == f.object,
            None => true,
        };
        if y_ok {
            assign.insert(atom.y.clone(), f.object.clone());
            if match_from(atoms, depth + 1, rel_facts, facts, mask, assign) {
                return true;
            }
            match prev_y {
                Some(v) => assign.insert(atom.y.clone(), v),
                None => assign.remove(&atom.y),
            };
        }
        match prev_x {
            Some(v) => assign.insert(atom.x.clone(), v),
            None => assign.remove(&atom.x),
        };
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(text: &str) -> Instance {
        Instance::parse(text).unwrap()
    }

    #[test]
    fn parse_q0() {
        let q = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        match &q.kind {
            QueryKind::Ucq(ds) => {
                assert_eq!(ds.len(), 1);
                assert_eq!(ds[0].len(), 3);
            }
            _ => panic!("expected ucq"),
        }
    }

    #[test]
    fn parse_rpq_one_way() {
        let q = Query::parse("rpq: R . S* . T").unwrap();
        match &q.kind {
            QueryKind::Rpq(r) => assert!(!r.two_way),
            _ => panic!("expected rpq"),
        }
    }

    #[test]
    fn parse_error_position() {
        let e = Query::parse("ucq: R(x").unwrap_err();
        assert!(matches!(e, Error::Syntax { .. }));
    }

    #[test]
    fn parse_rejects_unknown_tag() {
        assert!(Query::parse("rpq[3way]: R").unwrap_err().to_string().contains("unknown"));
    }

    #[test]
    fn display_roundtrip() {
        for s in [
            "ucq: R(x,x),S(x,y),T(y,y)",
            "ucq: R(x,x),S(x,y) | A(z,z)",
            "rpq[2way]: R . S* . T",
            "rpq[2way,start=R,end=T]: S+",
            "rpq: (R | S)* . T",
        ] {
            let q = Query::parse(s).unwrap();
            let q2 = Query::parse(&alloc::format!("{q}")).unwrap();
            assert_eq!(q, q2, "{s}");
        }
    }

    #[test]
    fn q0_holds_on_core() {
        let q = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        assert!(q.evaluate(&inst("R(a)\nS(a,b)\nT(b)")));
    }

    #[test]
    fn q0_fails_on_dissociated_core() {
        let q = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        assert!(!q.evaluate(&inst("R(a,a)\nS(a,b#1)\nS(a#1,b)\nT(b,b)")));
    }

    #[test]
    fn two_way_traverses_zigzag_one_way_does_not() {
        let i = inst("R(a,a)\nS(a,b)\nS(c,b)\nS(c,d)\nT(d,d)");
        let two = Query::parse("rpq[2way]: R . S* . T").unwrap();
        let one = Query::parse("rpq: R . S* . T").unwrap();
        assert!(two.evaluate(&i));
        assert!(!one.evaluate(&i));
    }

    #[test]
    fn rpq_with_tags() {
        let q = Query::parse("rpq[start=R,end=T]: S").unwrap();
        assert!(q.evaluate(&inst("R(a)\nS(a,b)\nT(b)")));
        assert!(!q.evaluate(&inst("S(a,b)\nT(b)")));
    }

    #[test]
    fn minimal_models_single() {
        let q = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        let i = inst("R(a)\nS(a,b)\nT(b)\nT(c)");
        // Independent oracle over all 16 subsets.
        let subs = i.subinstances(24).unwrap();
        let mut expected = Vec::new();
        for (m, sub) in subs.iter() {
            if q.evaluate(&sub) {
                let minimal = (0..4).all(|b| m >> b & 1 == 0 || !q.evaluate(&subs.get(m & !(1 << b))));
                if minimal {
                    expected.push(sub);
                }
            }
        }
        let got = q.minimal_models_within(&i, 24).unwrap();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0], inst("R(a)\nS(a,b)\nT(b)"));
    }

    #[test]
    fn minimal_models_unsatisfied_is_empty() {
        let q = Query::parse("ucq: A(x,y)").unwrap();
        assert!(q.minimal_models_within(&inst("S(a,b)"), 24).unwrap().is_empty());
    }

    #[test]
    fn minimal_models_two_branches() {
        let q = Query::parse("ucq: R(x,x),S(x,y),T(y,y)").unwrap();
        let i = inst("R(a)\nS(a,b)\nS(a,c)\nT(b)\nT(c)");
        assert_eq!(q.minimal_models_within(&i, 24).unwrap().len(), 2);
    }

    #[test]
    fn ucq_matches_brute_force_assignments() {
        // All-assignments oracle on small instances.
        let q = Query::parse("ucq: S(x,y),S(y,z)").unwrap();
        for text in ["S(a,b)\nS(b,c)", "S(a,b)\nS(c,d)", "S(a,a)", "S(a,b)"] {
            let i = inst(text);
            let dom: Vec<Elem> = i.dom().into_iter().collect();
            let mut brute = false;
            for x in &dom {
                for y in &dom {
                    for z in &dom {
                        let f1 = Fact { rel: Relation::new("S"), subject: x.clone(), object: y.clone() };
                        let f2 = Fact { rel: Relation::new("S"), subject: y.clone(), object: z.clone() };
                        if i.contains(&f1) && i.contains(&f2) {
                            brute = true;
                        }
                    }
                }
            }
            assert_eq!(q.evaluate(&i), brute, "{text}");
        }
    }

    #[test]
    fn encode_unary_primes_equal_var_atoms_and_tags() {
        let q = Query::parse("ucq: R(x),S(x,y),T(y)").unwrap();
        let enc = q.encode_unary();
        assert_eq!(alloc::format!("{enc}"), "ucq: R'(x,x),S(x,y),T'(y,y)");
        let q = Query::parse("rpq[start=R,end=T]: S+").unwrap();
        assert_eq!(alloc::format!("{}", q.encode_unary()), "rpq[start=R',end=T']: S+");
    }

    #[test]
    fn words_enumeration() {
        let q = Query::parse("rpq: R . S* . T").unwrap();
        let QueryKind::Rpq(rpq) = &q.kind else { unreachable!() };
        let nfa = Nfa::compile(&rpq.regex);
        let words = nfa.words_up_to(4, 100).unwrap();
        let rendered: Vec<String> = words
            .iter()
            .map(|w| w.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(""))
            .collect();
        assert_eq!(rendered, ["RSST", "RST", "RT"]);
    }
}
