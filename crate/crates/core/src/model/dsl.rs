//! Line/block DSL for goal models.
//!
//! ```text
//! model         := ("revision" NUMBER)? actor process
//! actor         := "actor" STRING "skill" ("Lay"|"Tech")
//! process       := "process" STRING "{" strategic* "}"
//! strategic     := "strategic" STRING "analysis" ANALYSIS "{" decision* "}"
//! decision      := "decision" STRING "{" information* "}"
//! information   := "information" STRING "{" visualization? "}"
//! visualization := "visualization" STRING "{" clause* "}"
//! clause        := "goals" GOAL ("," GOAL)*
//!                | "interactions" INTER ("," INTER)*
//!                | ("category"|"measure") NAME "from" NAME
//!                | "structure" ("Flat"|"Tree"|"Graph")
//! NAME          := WORD | STRING
//! ```
//!
//! The parser accepts empty blocks and missing clauses so that multiplicity
//! violations are reported by [`validate_model`](super::validate_model) with
//! a model path instead of a bare syntax error.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{
    AnalysisType, BusinessProcess, DataBinding, DecisionGoal, GoalModel, InformationGoal, InteractionType, Role, Skill,
    StrategicGoal, Structure, VisualizationActor, VisualizationGoal, VisualizationTask,
};
use crate::error::{Diagnostic, DiagnosticCode, SourcePos};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    Comma,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: SourcePos,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn lex(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut column) = (1u32, 1u32);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = SourcePos { line, column };
        match c {
            _ if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | ',' => {
                bump!();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    _ => Tok::Comma,
                };
                tokens.push(Token { tok, pos });
            }
            '"' => {
                bump!();
                let mut text = String::new();
                loop {
                    match bump!() {
                        None => {
                            return Err(Diagnostic::new(DiagnosticCode::Syntax, "source", "unterminated string").at(pos))
                        }
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => text.push('"'),
                            Some('\\') => text.push('\\'),
                            Some('n') => text.push('\n'),
                            Some('t') => text.push('\t'),
                            Some('r') => text.push('\r'),
                            other => {
                                return Err(Diagnostic::new(
                                    DiagnosticCode::Syntax,
                                    "source",
                                    format!("invalid escape {:?}", other.map(String::from).unwrap_or_default()),
                                )
                                .at(SourcePos { line, column }))
                            }
                        },
                        Some(c) => text.push(c),
                    }
                }
                tokens.push(Token {
                    tok: Tok::Str(text),
                    pos,
                });
            }
            _ if is_word_char(c) => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if !is_word_char(c) {
                        break;
                    }
                    word.push(c);
                    bump!();
                }
                tokens.push(Token {
                    tok: Tok::Word(word),
                    pos,
                });
            }
            _ => {
                return Err(
                    Diagnostic::new(DiagnosticCode::Syntax, "source", format!("unexpected character {c:?}")).at(pos),
                )
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        pos: SourcePos { line, column },
    });
    Ok(tokens)
}

/// Fatal parse stop; the diagnostic has already been recorded.
struct Abort;

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    diags: Vec<Diagnostic>,
    vis_names: HashMap<String, SourcePos>,
}

type PResult<T> = Result<T, Abort>;

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&mut self, path: &str, expected: &str) -> PResult<T> {
        let t = self.peek().clone();
        self.diags.push(
            Diagnostic::new(
                DiagnosticCode::Syntax,
                path,
                format!("expected {expected}, found {}", describe(&t.tok)),
            )
            .at(t.pos),
        );
        Err(Abort)
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == kw)
    }

    fn keyword(&mut self, path: &str, kw: &str) -> PResult<SourcePos> {
        if self.peek_keyword(kw) {
            Ok(self.next().pos)
        } else {
            self.syntax(path, &format!("`{kw}`"))
        }
    }

    fn string(&mut self, path: &str, what: &str) -> PResult<String> {
        match self.peek().tok.clone() {
            Tok::Str(s) => {
                self.next();
                Ok(s)
            }
            _ => self.syntax(path, what),
        }
    }

    fn word(&mut self, path: &str, what: &str) -> PResult<(String, SourcePos)> {
        match self.peek().tok.clone() {
            Tok::Word(w) => {
                let pos = self.next().pos;
                Ok((w, pos))
            }
            _ => self.syntax(path, what),
        }
    }

    /// Attribute and collection names: bare word or quoted string.
    fn name(&mut self, path: &str, what: &str) -> PResult<String> {
        match self.peek().tok.clone() {
            Tok::Word(w) | Tok::Str(w) => {
                self.next();
                Ok(w)
            }
            _ => self.syntax(path, what),
        }
    }

    fn punct(&mut self, path: &str, tok: Tok) -> PResult<()> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            self.syntax(path, &describe(&tok))
        }
    }

    /// Parses a keyword enumeration value. Unknown values are recorded as
    /// `E_BAD_ENUM` and yield `None` without aborting.
    fn enum_value<T: std::str::FromStr>(&mut self, path: &str, what: &str) -> PResult<Option<T>> {
        let (word, pos) = self.word(path, what)?;
        match word.parse::<T>() {
            Ok(v) => Ok(Some(v)),
            Err(_) => {
                self.diags
                    .push(Diagnostic::new(DiagnosticCode::BadEnum, path, format!("unknown {what} `{word}`")).at(pos));
                Ok(None)
            }
        }
    }

    fn model(&mut self) -> PResult<GoalModel> {
        let mut revision = 0;
        if self.peek_keyword("revision") {
            self.next();
            let (word, pos) = self.word("model", "revision number")?;
            match word.parse::<u32>() {
                Ok(n) => revision = n,
                Err(_) => {
                    self.diags.push(
                        Diagnostic::new(
                            DiagnosticCode::Syntax,
                            "model",
                            format!("invalid revision number `{word}`"),
                        )
                        .at(pos),
                    );
                    return Err(Abort);
                }
            }
        }
        self.keyword("actor", "actor")?;
        let name = self.string("actor", "actor name string")?;
        self.keyword("actor", "skill")?;
        let skill = self.enum_value::<Skill>("actor", "skill")?.unwrap_or(Skill::Lay);
        let process = self.process()?;
        if self.peek().tok != Tok::Eof {
            return self.syntax("model", "end of input");
        }
        Ok(GoalModel {
            actor: VisualizationActor { name, skill },
            process,
            revision,
        })
    }

    fn process(&mut self) -> PResult<BusinessProcess> {
        self.keyword("process", "process")?;
        let name = self.string("process", "process name string")?;
        self.punct("process", Tok::LBrace)?;
        let mut strategic_goals = Vec::new();
        while !self.at_close() {
            let path = format!("process/strategic[{}]", strategic_goals.len());
            strategic_goals.push(self.strategic(&path)?);
        }
        self.punct("process", Tok::RBrace)?;
        Ok(BusinessProcess { name, strategic_goals })
    }

    fn at_close(&self) -> bool {
        matches!(self.peek().tok, Tok::RBrace | Tok::Eof)
    }

    fn strategic(&mut self, path: &str) -> PResult<StrategicGoal> {
        self.keyword(path, "strategic")?;
        let statement = self.string(path, "strategic goal string")?;
        self.keyword(path, "analysis")?;
        let analysis_type = self
            .enum_value::<AnalysisType>(path, "analysis type")?
            .unwrap_or(AnalysisType::Descriptive);
        self.punct(path, Tok::LBrace)?;
        let mut decision_goals = Vec::new();
        while !self.at_close() {
            let p = format!("{path}/decision[{}]", decision_goals.len());
            decision_goals.push(self.decision(&p)?);
        }
        self.punct(path, Tok::RBrace)?;
        Ok(StrategicGoal {
            statement,
            analysis_type,
            decision_goals,
        })
    }

    fn decision(&mut self, path: &str) -> PResult<DecisionGoal> {
        self.keyword(path, "decision")?;
        let statement = self.string(path, "decision goal string")?;
        self.punct(path, Tok::LBrace)?;
        let mut information_goals = Vec::new();
        while !self.at_close() {
            let p = format!("{path}/information[{}]", information_goals.len());
            information_goals.push(self.information(&p)?);
        }
        self.punct(path, Tok::RBrace)?;
        Ok(DecisionGoal {
            statement,
            information_goals,
        })
    }

    fn information(&mut self, path: &str) -> PResult<InformationGoal> {
        self.keyword(path, "information")?;
        let statement = self.string(path, "information goal string")?;
        self.punct(path, Tok::LBrace)?;
        let mut visualization = None;
        while !self.at_close() {
            let pos = self.peek().pos;
            let vis = self.visualization(path)?;
            if visualization.is_some() {
                self.diags.push(
                    Diagnostic::new(
                        DiagnosticCode::InfoMultiVis,
                        path,
                        "an information goal has exactly one visualization",
                    )
                    .at(pos),
                );
            } else {
                visualization = Some(vis);
            }
        }
        self.punct(path, Tok::RBrace)?;
        Ok(InformationGoal {
            statement,
            visualization,
        })
    }

    fn visualization(&mut self, parent: &str) -> PResult<VisualizationTask> {
        let path = format!("{parent}/visualization");
        self.keyword(&path, "visualization")?;
        let name_pos = self.peek().pos;
        let name = self.string(&path, "visualization name string")?;
        let path = format!("{parent}/visualization[{name}]");
        if let Some(first) = self.vis_names.get(&name) {
            self.diags.push(
                Diagnostic::new(
                    DiagnosticCode::DupName,
                    &path,
                    format!("visualization name already used at {}:{}", first.line, first.column),
                )
                .at(name_pos),
            );
        } else {
            self.vis_names.insert(name.clone(), name_pos);
        }
        self.punct(&path, Tok::LBrace)?;

        let mut goals = BTreeSet::new();
        let mut interactions = BTreeSet::new();
        let mut bindings = Vec::new();
        let mut structure = None;
        let (mut seen_goals, mut seen_interactions) = (false, false);

        while !self.at_close() {
            let Tok::Word(kw) = self.peek().tok.clone() else {
                return self.syntax(&path, "visualization clause");
            };
            let kw_pos = self.peek().pos;
            match kw.as_str() {
                "goals" => {
                    if seen_goals {
                        return self.repeated(&path, "goals", kw_pos);
                    }
                    seen_goals = true;
                    self.next();
                    self.list(&path, "visualization goal", &mut goals)?;
                }
                "interactions" => {
                    if seen_interactions {
                        return self.repeated(&path, "interactions", kw_pos);
                    }
                    seen_interactions = true;
                    self.next();
                    self.list(&path, "interaction type", &mut interactions)?;
                }
                "category" | "measure" => {
                    self.next();
                    let role = if kw == "category" {
                        Role::Category
                    } else {
                        Role::Measure
                    };
                    let attribute = self.name(&path, "attribute name")?;
                    self.keyword(&path, "from")?;
                    let collection = self.name(&path, "collection name")?;
                    bindings.push(DataBinding {
                        role,
                        attribute,
                        collection,
                    });
                }
                "structure" => {
                    if structure.is_some() {
                        return self.repeated(&path, "structure", kw_pos);
                    }
                    self.next();
                    structure = Some(
                        self.enum_value::<Structure>(&path, "structure")?
                            .unwrap_or(Structure::Flat),
                    );
                }
                _ => return self.syntax(&path, "`goals`, `interactions`, `category`, `measure` or `structure`"),
            }
        }
        self.punct(&path, Tok::RBrace)?;
        Ok(VisualizationTask {
            name,
            goals,
            interactions,
            bindings,
            structure: structure.unwrap_or(Structure::Flat),
        })
    }

    fn repeated<T>(&mut self, path: &str, clause: &str, pos: SourcePos) -> PResult<T> {
        self.diags
            .push(Diagnostic::new(DiagnosticCode::Syntax, path, format!("`{clause}` may appear only once")).at(pos));
        Err(Abort)
    }

    fn list<T: std::str::FromStr + Ord>(&mut self, path: &str, what: &str, into: &mut BTreeSet<T>) -> PResult<()> {
        loop {
            if let Some(v) = self.enum_value::<T>(path, what)? {
                into.insert(v);
            }
            if self.peek().tok == Tok::Comma {
                self.next();
            } else {
                return Ok(());
            }
        }
    }
}

/// Parses DSL text into a goal model.
///
/// Returns every diagnostic found (`E_SYNTAX`, `E_BAD_ENUM`, `E_DUP_NAME`,
/// `E_INFO_MULTI_VIS`). Syntax errors stop the parse; the others do not.
pub fn parse_model(source: &str) -> Result<GoalModel, Vec<Diagnostic>> {
    let tokens = lex(source).map_err(|d| vec![d])?;
    let mut parser = Parser {
        tokens,
        at: 0,
        diags: Vec::new(),
        vis_names: HashMap::new(),
    };
    match parser.model() {
        Ok(model) if parser.diags.is_empty() => Ok(model),
        _ => Err(parser.diags),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn name(s: &str) -> String {
    if !s.is_empty() && s.chars().all(is_word_char) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn join<T: Copy>(items: &BTreeSet<T>, kw: fn(T) -> &'static str) -> String {
    items.iter().map(|v| kw(*v)).collect::<Vec<_>>().join(", ")
}

/// Canonical DSL text. Enumeration sets are written in declaration order,
/// bindings in list order, two-space indentation.
pub fn serialize_model(model: &GoalModel) -> String {
    let mut out = String::new();
    if model.revision > 0 {
        let _ = writeln!(out, "revision {}", model.revision);
    }
    let _ = writeln!(out, "actor {} skill {}", quote(&model.actor.name), model.actor.skill);
    let _ = writeln!(out, "process {} {{", quote(&model.process.name));
    for s in &model.process.strategic_goals {
        let _ = writeln!(
            out,
            "  strategic {} analysis {} {{",
            quote(&s.statement),
            s.analysis_type
        );
        for d in &s.decision_goals {
            let _ = writeln!(out, "    decision {} {{", quote(&d.statement));
            for i in &d.information_goals {
                let _ = writeln!(out, "      information {} {{", quote(&i.statement));
                if let Some(v) = &i.visualization {
                    let _ = writeln!(out, "        visualization {} {{", quote(&v.name));
                    if !v.goals.is_empty() {
                        let _ = writeln!(out, "          goals {}", join(&v.goals, VisualizationGoal::keyword));
                    }
                    if !v.interactions.is_empty() {
                        let _ = writeln!(
                            out,
                            "          interactions {}",
                            join(&v.interactions, InteractionType::keyword)
                        );
                    }
                    for b in &v.bindings {
                        let _ = writeln!(
                            out,
                            "          {} {} from {}",
                            b.role.keyword(),
                            name(&b.attribute),
                            name(&b.collection)
                        );
                    }
                    if v.structure != Structure::Flat {
                        let _ = writeln!(out, "          structure {}", v.structure);
                    }
                    out.push_str("        }\n");
                }
                out.push_str("      }\n");
            }
            out.push_str("    }\n");
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}
