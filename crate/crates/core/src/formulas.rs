//! Tense formulas: syntax tree, ASCII parser and printer, derived
//! connectives and the parameterised axiom schemas.
//!
//! Concrete syntax: `[]` future box, `<>` future diamond, `[p]` past box,
//! `<p>` past diamond, `~`, `&`, `|`, `->`, `T`, `F`, atoms `p0`, `p1`, ...
//! Unary operators bind tightest, then `&`, then `|`, then `->` which
//! associates to the right.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

pub type Var = u32;

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Formula {
    Atom(Var),
    Bot,
    Top,
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    /// `□`: true at x when true at every R-successor.
    FutBox(Arc<Formula>),
    /// `◇`
    FutDia(Arc<Formula>),
    /// `■`: true at x when true at every R-predecessor.
    PastBox(Arc<Formula>),
    /// `♦`
    PastDia(Arc<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(v: Var) -> Formula {
        Atom(v)
    }

    pub fn not(self) -> Formula {
        Not(Arc::new(self))
    }

    pub fn and(self, rhs: Formula) -> Formula {
        And(Arc::new(self), Arc::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Formula {
        Or(Arc::new(self), Arc::new(rhs))
    }

    pub fn implies(self, rhs: Formula) -> Formula {
        Implies(Arc::new(self), Arc::new(rhs))
    }

    pub fn fbox(self) -> Formula {
        FutBox(Arc::new(self))
    }

    pub fn fdia(self) -> Formula {
        FutDia(Arc::new(self))
    }

    pub fn pbox(self) -> Formula {
        PastBox(Arc::new(self))
    }

    pub fn pdia(self) -> Formula {
        PastDia(Arc::new(self))
    }

    /// Left-nested conjunction; `T` when empty.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Top)
    }

    /// Left-nested disjunction; `F` when empty.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Bot)
    }

    /// Rewrites into the primitive connectives `⊥ → □ ♦`.
    pub fn expand(&self) -> Formula {
        let neg = |f: Formula| f.implies(Bot);
        match self {
            Atom(v) => Atom(*v),
            Bot => Bot,
            Top => Bot.implies(Bot),
            Not(a) => neg(a.expand()),
            And(a, b) => neg(a.expand().implies(neg(b.expand()))),
            Or(a, b) => neg(a.expand()).implies(b.expand()),
            Implies(a, b) => a.expand().implies(b.expand()),
            FutBox(a) => a.expand().fbox(),
            FutDia(a) => neg(neg(a.expand()).fbox()),
            PastBox(a) => neg(neg(a.expand()).pdia()),
            PastDia(a) => a.expand().pdia(),
        }
    }

    /// Replaces each atom `v` by `s(v)`, or leaves it when `s` gives `None`.
    pub fn substitute(&self, s: &impl Fn(Var) -> Option<Formula>) -> Formula {
        let go = |a: &Arc<Formula>| Arc::new(a.substitute(s));
        match self {
            Atom(v) => s(*v).unwrap_or(Atom(*v)),
            Bot => Bot,
            Top => Top,
            Not(a) => Not(go(a)),
            And(a, b) => And(go(a), go(b)),
            Or(a, b) => Or(go(a), go(b)),
            Implies(a, b) => Implies(go(a), go(b)),
            FutBox(a) => FutBox(go(a)),
            FutDia(a) => FutDia(go(a)),
            PastBox(a) => PastBox(go(a)),
            PastDia(a) => PastDia(go(a)),
        }
    }

    pub fn is_primitive(&self) -> bool {
        match self {
            Atom(_) | Bot => true,
            Implies(a, b) => a.is_primitive() && b.is_primitive(),
            FutBox(a) | PastDia(a) => a.is_primitive(),
            _ => false,
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Atom(v) => {
                out.insert(*v);
            }
            Bot | Top => {}
            Not(a) | FutBox(a) | FutDia(a) | PastBox(a) | PastDia(a) => a.collect_vars(out),
            And(a, b) | Or(a, b) | Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Modal depth. Derived connectives do not change it.
    pub fn modal_depth(&self) -> u32 {
        match self {
            Atom(_) | Bot | Top => 0,
            Not(a) => a.modal_depth(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.modal_depth().max(b.modal_depth()),
            FutBox(a) | FutDia(a) | PastBox(a) | PastDia(a) => a.modal_depth() + 1,
        }
    }

    /// Fully parenthesised ASCII rendering accepted by [`parse`].
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s);
        s
    }

    fn render_into(&self, s: &mut String) {
        let bin = |s: &mut String, a: &Formula, op: &str, b: &Formula| {
            s.push('(');
            a.render_into(s);
            s.push_str(op);
            b.render_into(s);
            s.push(')');
        };
        match self {
            Atom(v) => {
                s.push('p');
                s.push_str(&v.to_string());
            }
            Bot => s.push('F'),
            Top => s.push('T'),
            Not(a) => {
                s.push('~');
                a.render_into(s);
            }
            And(a, b) => bin(s, a, " & ", b),
            Or(a, b) => bin(s, a, " | ", b),
            Implies(a, b) => bin(s, a, " -> ", b),
            FutBox(a) => {
                s.push_str("[]");
                a.render_into(s);
            }
            FutDia(a) => {
                s.push_str("<>");
                a.render_into(s);
            }
            PastBox(a) => {
                s.push_str("[p]");
                a.render_into(s);
            }
            PastDia(a) => {
                s.push_str("<p>");
                a.render_into(s);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Syntactic measures, computed on the primitive expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub variables: BTreeSet<Var>,
    /// Connective count where `→`, `□`, `♦` each add one.
    pub complexity: u32,
    pub modal_depth: u32,
    /// Distinct subformulas of the expansion, smallest first.
    pub subformulas: Vec<Formula>,
}

pub fn analyze(phi: &Formula) -> Analysis {
    fn complexity(f: &Formula) -> u32 {
        match f {
            Implies(a, b) => complexity(a).max(complexity(b)) + 1,
            FutBox(a) | PastDia(a) => complexity(a) + 1,
            _ => 0,
        }
    }
    fn subs(f: &Formula, out: &mut BTreeSet<(usize, Formula)>) {
        out.insert((size(f), f.clone()));
        match f {
            Implies(a, b) => {
                subs(a, out);
                subs(b, out);
            }
            FutBox(a) | PastDia(a) => subs(a, out),
            _ => {}
        }
    }
    let e = phi.expand();
    let mut set = BTreeSet::new();
    subs(&e, &mut set);
    Analysis {
        variables: e.variables(),
        complexity: complexity(&e),
        modal_depth: e.modal_depth(),
        subformulas: set.into_iter().map(|(_, f)| f).collect(),
    }
}

/// Number of nodes of the syntax tree.
pub fn size(f: &Formula) -> usize {
    match f {
        Atom(_) | Bot | Top => 1,
        Not(a) | FutBox(a) | FutDia(a) | PastBox(a) | PastDia(a) => 1 + size(a),
        And(a, b) | Or(a, b) | Implies(a, b) => 1 + size(a) + size(b),
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.implication()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat("->") {
            Ok(lhs.implies(self.implication()?))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.eat("|") {
            f = f.or(self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat("&") {
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat("~") {
            return Ok(self.unary()?.not());
        }
        if self.eat("[]") {
            return Ok(self.unary()?.fbox());
        }
        if self.eat("<>") {
            return Ok(self.unary()?.fdia());
        }
        if self.eat("[p]") {
            return Ok(self.unary()?.pbox());
        }
        if self.eat("<p>") {
            return Ok(self.unary()?.pdia());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        if self.eat("(") {
            let f = self.implication()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(f);
        }
        match self.src.get(self.pos) {
            Some(b'T') => {
                self.pos += 1;
                Ok(Top)
            }
            Some(b'F') => {
                self.pos += 1;
                Ok(Bot)
            }
            Some(b'p') => {
                let start = self.pos + 1;
                let mut end = start;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                if end == start {
                    return Err(ParseError {
                        pos: start,
                        message: "expected digits after `p`".into(),
                    });
                }
                let digits = std::str::from_utf8(&self.src[start..end]).unwrap();
                let v = digits.parse().map_err(|_| ParseError {
                    pos: start,
                    message: "variable index too large".into(),
                })?;
                self.pos = end;
                Ok(Atom(v))
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// `Δⁿφ`: the disjunction of `wφ` over all words `w` in `◇`, `♦` of length
/// at most `n`, shortest first and `◇` before `♦`.
pub fn delta(n: u32, phi: &Formula) -> Formula {
    let mut level = vec![phi.clone()];
    let mut all = level.clone();
    for _ in 0..n {
        let next: Vec<Formula> = level
            .iter()
            .map(|f| f.clone().fdia())
            .chain(level.iter().map(|f| f.clone().pdia()))
            .collect();
        all.extend(next.iter().cloned());
        level = next;
    }
    Formula::disj(all)
}

/// `∇ⁿφ = ¬Δⁿ¬φ`, with `∇⁰φ` written as `φ` itself.
pub fn nabla(n: u32, phi: &Formula) -> Formula {
    if n == 0 {
        return phi.clone();
    }
    delta(n, &phi.clone().not()).not()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Schema {
    Tab,
    Bd,
    Bz,
    BwPlus,
    BwMinus,
    AltPlus,
    AltMinus,
    Grz,
    T,
    Four,
    S5,
    LinPlus,
    LinMinus,
}

impl Schema {
    pub const ALL: [Schema; 13] = [
        Schema::Tab,
        Schema::Bd,
        Schema::Bz,
        Schema::BwPlus,
        Schema::BwMinus,
        Schema::AltPlus,
        Schema::AltMinus,
        Schema::Grz,
        Schema::T,
        Schema::Four,
        Schema::S5,
        Schema::LinPlus,
        Schema::LinMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Schema::Tab => "tab",
            Schema::Bd => "bd",
            Schema::Bz => "bz",
            Schema::BwPlus => "bw+",
            Schema::BwMinus => "bw-",
            Schema::AltPlus => "alt+",
            Schema::AltMinus => "alt-",
            Schema::Grz => "grz",
            Schema::T => "t",
            Schema::Four => "4",
            Schema::S5 => "s5",
            Schema::LinPlus => "lin+",
            Schema::LinMinus => "lin-",
        }
    }

    pub fn from_name(name: &str) -> Option<Schema> {
        Schema::ALL.into_iter().find(|s| s.name().eq_ignore_ascii_case(name))
    }

    pub fn is_parameterised(self) -> bool {
        matches!(
            self,
            Schema::Tab
                | Schema::Bd
                | Schema::Bz
                | Schema::BwPlus
                | Schema::BwMinus
                | Schema::AltPlus
                | Schema::AltMinus
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    N(u32),
    Omega,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("schema `{0}` needs a parameter n >= 1 or omega")]
    MissingParameter(&'static str),
    #[error("schema `{0}` takes no parameter")]
    UnexpectedParameter(&'static str),
    #[error("schema `{0}` needs n >= 1")]
    ZeroParameter(&'static str),
}

fn p(i: u32) -> Formula {
    Atom(i)
}

/// Instantiates a schema. Parameterised schemas at omega are `T`.
pub fn schema(s: Schema, param: Option<Param>) -> Result<Formula, SchemaError> {
    let n = match (s.is_parameterised(), param) {
        (true, None) => return Err(SchemaError::MissingParameter(s.name())),
        (true, Some(Param::Omega)) => return Ok(Top),
        (true, Some(Param::N(0))) => return Err(SchemaError::ZeroParameter(s.name())),
        (true, Some(Param::N(n))) => n,
        (false, Some(_)) => return Err(SchemaError::UnexpectedParameter(s.name())),
        (false, None) => 0,
    };
    let f = match s {
        Schema::Tab => {
            let psi = |i: u32| Formula::conj((0..i).map(|j| p(j).not()).chain([p(i)]));
            Formula::conj((0..=n).map(|i| delta(n, &psi(i)))).not()
        }
        Schema::Bd => {
            let mut bd = p(0).fbox().fdia().implies(p(0));
            for k in 1..n {
                bd = p(k).fbox().and(bd.not()).fdia().implies(p(k));
            }
            bd
        }
        Schema::Bz => delta(n + 1, &p(0)).implies(delta(n, &p(0))),
        Schema::BwPlus | Schema::BwMinus => {
            let dia = |f: Formula| if s == Schema::BwPlus { f.fdia() } else { f.pdia() };
            let lhs = Formula::conj((0..=n).map(|i| dia(p(i))));
            let rhs = Formula::disj((0..=n).flat_map(|i| {
                (0..=n)
                    .filter(move |&j| j != i)
                    .map(move |j| dia(p(i).and(p(j).or(dia(p(j))))))
            }));
            lhs.implies(rhs)
        }
        Schema::AltPlus | Schema::AltMinus => {
            let bx = |f: Formula| if s == Schema::AltPlus { f.fbox() } else { f.pbox() };
            let terms = (0..=n).map(|i| {
                if i == 0 {
                    bx(p(0))
                } else {
                    bx(Formula::conj((0..i).map(p)).implies(p(i)))
                }
            });
            Formula::disj(terms)
        }
        Schema::Grz => p(0).implies(p(0).fbox()).fbox().implies(p(0)).fbox().implies(p(0)),
        Schema::T => p(0).fbox().implies(p(0)),
        Schema::Four => p(0).fbox().implies(p(0).fbox().fbox()),
        Schema::S5 => p(0).fdia().implies(p(0).fdia().fbox()),
        Schema::LinPlus => p(0).fdia().fbox().implies(p(0).fbox().fdia()),
        Schema::LinMinus => p(0).pdia().pbox().implies(p(0).pbox().pdia()),
    };
    Ok(f)
}

/// Random formula over the first `vars` variables with modal depth at most
/// `max_depth`; `size` bounds the number of connectives drawn.
pub fn random_formula<R: Rng>(rng: &mut R, vars: u32, max_depth: u32, size: u32) -> Formula {
    if size == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Bot,
            1 => Top,
            _ if vars == 0 => Top,
            _ => Atom(rng.gen_range(0..vars)),
        };
    }
    let unary_modal = max_depth > 0;
    let choice = rng.gen_range(0..if unary_modal { 8 } else { 4 });
    let sub = |rng: &mut R, d| random_formula(rng, vars, d, size - 1);
    match choice {
        0 => sub(rng, max_depth).not(),
        1 => sub(rng, max_depth).and(sub(rng, max_depth)),
        2 => sub(rng, max_depth).or(sub(rng, max_depth)),
        3 => sub(rng, max_depth).implies(sub(rng, max_depth)),
        4 => sub(rng, max_depth - 1).fbox(),
        5 => sub(rng, max_depth - 1).fdia(),
        6 => sub(rng, max_depth - 1).pbox(),
        _ => sub(rng, max_depth - 1).pdia(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_examples() {
        let p0 = Formula::atom(0);
        let bot = |v: Var| (v == 0).then_some(Bot);
        assert_eq!(p0.clone().implies(p0.clone()).substitute(&bot), Bot.implies(Bot));
        let dia = |v: Var| (v == 0).then(|| Formula::atom(1).fdia());
        assert_eq!(p0.clone().fbox().substitute(&dia), Formula::atom(1).fdia().fbox());
        assert_eq!(Formula::atom(2).substitute(&dia), Formula::atom(2));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse("[]p0 -> p0").unwrap(), p(0).fbox().implies(p(0)));
        assert_eq!(parse("~(<>p1 & <p>p0)").unwrap(), p(1).fdia().and(p(0).pdia()).not());
        assert_eq!(parse("p0 -> p1 -> p2").unwrap(), p(0).implies(p(1).implies(p(2))));
        assert_eq!(parse("p0 | p1 & p2").unwrap(), p(0).or(p(1).and(p(2))));
        assert_eq!(parse("[p]T | F").unwrap(), Top.pbox().or(Bot));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(parse("p0 &").unwrap_err().pos, 4);
        assert_eq!(parse("(p0").unwrap_err().message, "expected `)`");
        assert_eq!(parse("p").unwrap_err().pos, 1);
        assert!(parse("p0 p1").is_err());
        assert!(parse("q0").is_err());
    }

    #[test]
    fn render_is_fully_parenthesised() {
        let f = parse("~(<>p1 & <p>p0)").unwrap();
        assert_eq!(f.render(), "~(<>p1 & <p>p0)");
        assert_eq!(parse("[]p0 -> p0").unwrap().render(), "([]p0 -> p0)");
    }

    #[test]
    fn analysis_of_box() {
        let a = analyze(&parse("[]p0").unwrap());
        assert_eq!(a.modal_depth, 1);
        assert_eq!(a.complexity, 1);
        assert_eq!(a.variables.into_iter().collect::<Vec<_>>(), vec![0]);
        assert_eq!(a.subformulas, vec![p(0), p(0).fbox()]);
    }

    #[test]
    fn complexity_counts_implication_nesting() {
        // ¬p = p → ⊥ has complexity 1; □¬p has 2
        assert_eq!(analyze(&p(0).not()).complexity, 1);
        assert_eq!(analyze(&p(0).not().fbox()).complexity, 2);
        assert_eq!(analyze(&p(0).implies(p(1).fbox())).complexity, 2);
    }

    #[test]
    fn delta_two_lists_all_short_words() {
        let q = p(0);
        let expected = Formula::disj([
            q.clone(),
            q.clone().fdia(),
            q.clone().pdia(),
            q.clone().fdia().fdia(),
            q.clone().pdia().fdia(),
            q.clone().fdia().pdia(),
            q.clone().pdia().pdia(),
        ]);
        assert_eq!(delta(2, &q), expected);
        assert_eq!(delta(0, &q), q);
    }

    #[test]
    fn tab_one_shape() {
        let psi1 = p(0).not().and(p(1));
        let d = |f: Formula| Formula::disj([f.clone(), f.clone().fdia(), f.pdia()]);
        let expected = d(p(0)).and(d(psi1)).not();
        assert_eq!(schema(Schema::Tab, Some(Param::N(1))).unwrap(), expected);
    }

    #[test]
    fn bd_two_shape() {
        let bd1 = p(0).fbox().fdia().implies(p(0));
        let bd2 = p(1).fbox().and(bd1.clone().not()).fdia().implies(p(1));
        assert_eq!(schema(Schema::Bd, Some(Param::N(1))).unwrap(), bd1);
        assert_eq!(schema(Schema::Bd, Some(Param::N(2))).unwrap(), bd2);
    }

    #[test]
    fn bw_and_alt_shapes() {
        let bw1 = p(0).fdia().and(p(1).fdia()).implies(
            p(0).and(p(1).or(p(1).fdia()))
                .fdia()
                .or(p(1).and(p(0).or(p(0).fdia())).fdia()),
        );
        assert_eq!(schema(Schema::BwPlus, Some(Param::N(1))).unwrap(), bw1);
        let alt2 = p(0)
            .pbox()
            .or(p(0).implies(p(1)).pbox())
            .or(p(0).and(p(1)).implies(p(2)).pbox());
        assert_eq!(schema(Schema::AltMinus, Some(Param::N(2))).unwrap(), alt2);
    }

    #[test]
    fn schema_parameter_errors() {
        assert_eq!(
            schema(Schema::Tab, Some(Param::N(0))),
            Err(SchemaError::ZeroParameter("tab"))
        );
        assert_eq!(schema(Schema::Bd, None), Err(SchemaError::MissingParameter("bd")));
        assert_eq!(
            schema(Schema::Grz, Some(Param::N(2))),
            Err(SchemaError::UnexpectedParameter("grz"))
        );
        assert_eq!(schema(Schema::Bz, Some(Param::Omega)), Ok(Top));
        assert_eq!(Schema::from_name("BW-"), Some(Schema::BwMinus));
    }

    #[test]
    fn modal_depths_of_schemas() {
        for n in 1..4 {
            let md = |s| schema(s, Some(Param::N(n))).unwrap().modal_depth();
            assert_eq!(md(Schema::Tab), n);
            assert_eq!(md(Schema::Bd), n + 1);
            assert_eq!(md(Schema::Bz), n + 1);
        }
        assert_eq!(schema(Schema::Grz, None).unwrap().modal_depth(), 3);
    }
}
