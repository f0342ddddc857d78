//! The `dlm` command-line front end.
//!
//! Exit codes: 0 true/valid/success, 1 false/countermodel/failed assertion,
//! 2 parse or usage error, 3 invalid input, 4 action not executable,
//! 5 enumeration budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::{Error, Result};
use crate::explorer::{self, Bounds, FrameClass, Verdict};
use crate::formula::{AgentId, Formula, PropId};
use crate::kripke::{self, Model, PointedModel, Strictness};
use crate::parser::Registry;
use crate::{dot, io, reduce, scenario, update};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NOT_EXECUTABLE: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "dlm", version, about = "Model checker for beliefs, observations and misdirection")]
pub struct Cli {
    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    JsonLines,
}

#[derive(Args, Debug, Clone)]
pub struct Signature {
    /// Comma-separated agent names.
    #[arg(long, value_delimiter = ',', default_value = "a,b")]
    pub agents: Vec<String>,
    /// Comma-separated proposition names.
    #[arg(long, value_delimiter = ',', default_value = "p,q")]
    pub props: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and print its canonical form.
    Parse {
        formula: String,
        #[command(flatten)]
        sig: Signature,
    },
    /// Evaluate a formula at the point of a model file.
    Check {
        model: PathBuf,
        formula: String,
        /// Print every evaluated subformula and intermediate product.
        #[arg(long)]
        trace: bool,
        /// Evaluate at this world instead of the file's point.
        #[arg(long)]
        point: Option<String>,
        /// Reject models whose relations are not serial, transitive and Euclidean.
        #[arg(long)]
        observational: bool,
        /// Named action model for `@name`, as NAME=FILE.
        #[arg(long = "action", value_name = "NAME=FILE")]
        actions: Vec<String>,
    },
    /// Apply an action to a model file and write the product.
    Update {
        model: PathBuf,
        /// Action expression, e.g. `show-(a, r & ~l)` or `@name`.
        action: String,
        /// Destination for the product model; printed when omitted.
        output: Option<PathBuf>,
        /// Also write the product as a Graphviz file.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Build the product even if the action is not executable at the point.
        #[arg(long)]
        force_product: bool,
        #[arg(long)]
        observational: bool,
        #[arg(long = "action", value_name = "NAME=FILE")]
        actions: Vec<String>,
    },
    /// Eliminate dynamic modalities.
    Translate {
        formula: String,
        #[command(flatten)]
        sig: Signature,
        /// Apply boolean simplification to the result.
        #[arg(long)]
        simplify: bool,
        /// Check the result against the input on all small models.
        #[arg(long)]
        check_equiv: bool,
        #[arg(long, default_value_t = 2)]
        max_worlds: usize,
    },
    /// Bounded validity (or, with --witness, satisfiability) check.
    Verify {
        formula: String,
        #[command(flatten)]
        sig: Signature,
        #[arg(long, default_value_t = 3)]
        max_worlds: usize,
        #[arg(long, default_value = "observational")]
        frame_class: String,
        /// Maximum number of candidate models; defaults to DLM_BUDGET.
        #[arg(long)]
        budget: Option<u128>,
        /// Search for a satisfying model instead of a countermodel.
        #[arg(long)]
        witness: bool,
    },
    /// Run a built-in scenario and check its expected facts.
    Scenario {
        name: ScenarioName,
        /// Directory for Graphviz files of every stage.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Convert a model or action file to Graphviz.
    Export {
        file: PathBuf,
        /// Treat the file as an action model.
        #[arg(long)]
        action: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    #[value(name = "french_drop", alias = "french-drop")]
    FrenchDrop,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::NotExecutable { .. } => EXIT_NOT_EXECUTABLE,
        Error::Budget { .. } => EXIT_BUDGET,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_TRUE };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut ctx = Ctx { format: cli.format, out, err };
    match ctx.dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            if ctx.format == Format::JsonLines {
                let _ = ctx.line(json!({"error": e.to_string(), "exit": code}));
            }
            let _ = writeln!(ctx.err, "error: {e}");
            code
        }
    }
}

struct Ctx<'o> {
    format: Format,
    out: &'o mut dyn Write,
    err: &'o mut dyn Write,
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(fs::write(path, text)?)
}

fn registry_of(sig: &Signature) -> Result<Registry> {
    for name in sig.agents.iter().chain(&sig.props) {
        if !crate::formula::is_identifier(name) {
            return Err(Error::Structure(format!("invalid name `{name}`")));
        }
    }
    Ok(Registry::new(sig.agents.iter().map(|a| AgentId::new(a)), sig.props.iter().map(|p| PropId::new(p))))
}

fn load_model(path: &Path, point: Option<&str>) -> Result<PointedModel> {
    let loaded = io::read_model(&read(path)?)?;
    io::require_valid(&loaded.model, Strictness::Relational)?;
    match point {
        Some(p) => loaded.model.point(p),
        None => loaded.pointed(),
    }
}

fn add_named_actions(reg: &mut Registry, specs: &[String]) -> Result<()> {
    for spec in specs {
        let (name, file) = spec
            .split_once('=')
            .ok_or_else(|| Error::Structure(format!("expected NAME=FILE, got `{spec}`")))?;
        let pa = io::read_action(&read(Path::new(file))?, reg)?;
        reg.add_action(name, pa);
    }
    Ok(())
}

impl Ctx<'_> {
    fn line(&mut self, value: serde_json::Value) -> Result<()> {
        writeln!(self.out, "{value}")?;
        Ok(())
    }

    fn text(&mut self, text: impl AsRef<str>) -> Result<()> {
        if self.format == Format::Text {
            writeln!(self.out, "{}", text.as_ref())?;
        }
        Ok(())
    }

    fn json(&mut self, value: serde_json::Value) -> Result<()> {
        if self.format == Format::JsonLines {
            self.line(value)?;
        }
        Ok(())
    }

    fn dispatch(&mut self, command: Command) -> Result<i32> {
        match command {
            Command::Parse { formula, sig } => {
                let f = registry_of(&sig)?.parse(&formula)?;
                self.text(f.to_string())?;
                self.json(json!({"command": "parse", "formula": f.to_string(), "static": f.is_static()}))?;
                Ok(EXIT_TRUE)
            }
            Command::Check { model, formula, trace, point, observational, actions } => {
                let pm = load_model(&model, point.as_deref())?;
                self.frame_conditions(&pm.model, observational)?;
                let mut reg = Registry::from_model(&pm.model);
                add_named_actions(&mut reg, &actions)?;
                let f = reg.parse(&formula)?;
                let value = kripke::satisfies(&pm, &f);
                if trace {
                    let t = kripke::trace(&pm, &f);
                    debug_assert_eq!(t.value, value);
                    self.text(t.to_string())?;
                    if self.format == Format::JsonLines {
                        for step in &t.steps {
                            self.line(json!({
                                "depth": step.depth, "model": step.model, "world": step.world,
                                "formula": step.formula, "value": step.value,
                            }))?;
                        }
                        for (i, (label, m)) in t.models.iter().enumerate().skip(1) {
                            self.line(json!({
                                "product": i, "label": label,
                                "model": io::model_to_doc(m, None),
                            }))?;
                        }
                    }
                } else {
                    self.text(value.to_string())?;
                }
                self.json(json!({"command": "check", "point": pm.point_name(), "result": value}))?;
                Ok(if value { EXIT_TRUE } else { EXIT_FALSE })
            }
            Command::Update { model, action, output, dot, force_product, observational, actions } => {
                let pm = load_model(&model, None)?;
                self.frame_conditions(&pm.model, observational)?;
                let mut reg = Registry::from_model(&pm.model);
                add_named_actions(&mut reg, &actions)?;
                let act = reg.parse_action(&action)?;
                let executable = kripke::satisfies(&pm, act.pointed().precondition());
                if !executable && !force_product {
                    return Err(Error::NotExecutable {
                        action: act.to_string(),
                        world: pm.point_name().to_owned(),
                    });
                }
                let product = update::apply_forced(&pm, act.pointed())
                    .ok_or_else(|| Error::Structure("the product has no worlds".into()))?;
                let text = io::write_pointed(&product);
                match &output {
                    Some(path) => write_file(path, &text)?,
                    None if self.format == Format::Text => writeln!(self.out, "{text}")?,
                    None => {}
                }
                if let Some(path) = &dot {
                    write_file(path, &dot::model_to_dot(&product.model, Some(product.point)))?;
                }
                if output.is_some() {
                    self.text(format!("{} worlds, point {}", product.model.len(), product.point_name()))?;
                }
                self.json(json!({
                    "command": "update", "action": act.to_string(), "executable": executable,
                    "worlds": product.model.worlds(), "point": product.point_name(),
                    "model": io::model_to_doc(&product.model, Some(product.point)),
                }))?;
                Ok(EXIT_TRUE)
            }
            Command::Translate { formula, sig, simplify, check_equiv, max_worlds } => {
                let reg = registry_of(&sig)?;
                let f = reg.parse(&formula)?;
                let mut t = reduce::translate(&f);
                if simplify {
                    t = reduce::simplify(&t);
                }
                self.text(t.to_string())?;
                self.json(json!({"command": "translate", "input": f.to_string(), "output": t.to_string()}))?;
                if !check_equiv {
                    return Ok(EXIT_TRUE);
                }
                let bounds = Bounds::new(
                    max_worlds,
                    reg.agents().iter().cloned(),
                    reg.props().iter().cloned(),
                    FrameClass::Observational,
                );
                let verdict = explorer::check_validity(&Formula::iff(f, t), &bounds)?;
                self.report_verdict("equivalent within bounds", &verdict)
            }
            Command::Verify { formula, sig, max_worlds, frame_class, budget, witness } => {
                let reg = registry_of(&sig)?;
                let f = reg.parse(&formula)?;
                let mut bounds = Bounds::new(
                    max_worlds,
                    reg.agents().iter().cloned(),
                    reg.props().iter().cloned(),
                    frame_class.parse()?,
                );
                bounds.budget = budget;
                if witness {
                    let found = explorer::find_witness(&f, &bounds)?;
                    match &found {
                        Some(pm) => {
                            self.text("witness:")?;
                            self.text(io::write_pointed(pm))?;
                        }
                        None => self.text("no witness within bounds")?,
                    }
                    self.json(json!({
                        "command": "verify", "mode": "witness",
                        "found": found.is_some(),
                        "model": found.as_ref().map(|pm| io::model_to_doc(&pm.model, Some(pm.point))),
                    }))?;
                    return Ok(if found.is_some() { EXIT_TRUE } else { EXIT_FALSE });
                }
                let verdict = explorer::check_validity(&f, &bounds)?;
                self.report_verdict("valid within bounds", &verdict)
            }
            Command::Scenario { name: ScenarioName::FrenchDrop, dot } => self.french_drop(dot.as_deref()),
            Command::Export { file, action, output } => {
                let text = read(&file)?;
                let graph = if action {
                    dot::action_to_dot(&io::read_action(&text, &Registry::default())?)
                } else {
                    let loaded = io::read_model(&text)?;
                    dot::model_to_dot(&loaded.model, loaded.point)
                };
                match output {
                    Some(path) => write_file(&path, &graph)?,
                    None => write!(self.out, "{graph}")?,
                }
                Ok(EXIT_TRUE)
            }
        }
    }

    /// Enforces the observational frame conditions when asked to, and warns
    /// about them otherwise.
    fn frame_conditions(&mut self, model: &Model, enforce: bool) -> Result<()> {
        if enforce {
            return io::require_valid(model, Strictness::Observational);
        }
        if let Err(e) = io::require_valid(model, Strictness::Observational) {
            writeln!(self.err, "warning: {e}")?;
        }
        Ok(())
    }

    fn report_verdict(&mut self, valid_text: &str, verdict: &Verdict) -> Result<i32> {
        match verdict {
            Verdict::ValidWithinBounds { checked } => {
                self.text(format!("{valid_text} ({checked} candidate models)"))?;
                self.json(json!({"verdict": "valid", "checked": checked.to_string()}))?;
                Ok(EXIT_TRUE)
            }
            Verdict::Countermodel(pm) => {
                self.text("countermodel:")?;
                self.text(io::write_pointed(pm))?;
                self.json(json!({
                    "verdict": "countermodel",
                    "model": io::model_to_doc(&pm.model, Some(pm.point)),
                }))?;
                Ok(EXIT_FALSE)
            }
        }
    }

    fn french_drop(&mut self, dot_dir: Option<&Path>) -> Result<i32> {
        let fd = scenario::french_drop();
        let stages: Vec<(&str, PointedModel)> = {
            let mid = update::apply(&fd.initial, fd.first_action.pointed()).ok_or_else(|| {
                Error::NotExecutable { action: fd.first_action.to_string(), world: "w".into() }
            })?;
            let end =
                update::apply(&mid, fd.second_action.pointed()).ok_or_else(|| Error::NotExecutable {
                    action: fd.second_action.to_string(),
                    world: mid.point_name().to_owned(),
                })?;
            vec![("initial", fd.initial.clone()), ("intermediate", mid), ("final", end)]
        };
        for (stage, pm) in &stages {
            self.text(format!(
                "{stage}: {} worlds [{}], point {}",
                pm.model.len(),
                pm.model.worlds().join(", "),
                pm.point_name()
            ))?;
            self.json(json!({
                "stage": stage, "worlds": pm.model.worlds(), "point": pm.point_name(),
            }))?;
            if let Some(dir) = dot_dir {
                let file = dir.join(format!("french_drop_{stage}.dot"));
                write_file(&file, &dot::model_to_dot(&pm.model, Some(pm.point)))?;
            }
        }

        let mut checks: Vec<(&str, &Model, usize, String)> = Vec::new();
        checks.push(("initial", &stages[0].1.model, 0, scenario::FRENCH_DROP_POSTERIOR.to_owned()));
        for fact in scenario::FRENCH_DROP_INTERMEDIATE_FACTS {
            checks.push(("intermediate", &stages[1].1.model, stages[1].1.point, fact.to_string()));
        }
        for fact in scenario::FRENCH_DROP_FINAL_FACTS {
            checks.push(("final", &stages[2].1.model, stages[2].1.point, fact.to_string()));
        }
        let expected_counts = [3, 4, 2];
        let counts_ok = stages.iter().zip(expected_counts).all(|((_, pm), n)| pm.model.len() == n);
        let mut failed = None;
        for (stage, model, point, text) in &checks {
            let f = fd.registry.parse(text)?;
            let value = kripke::satisfies(&(*model).clone().at(*point), &f);
            self.text(format!("[{}] {stage}: {text}", if value { "ok" } else { "FAIL" }))?;
            self.json(json!({"stage": stage, "formula": text, "holds": value}))?;
            if !value && failed.is_none() {
                failed = Some(text.clone());
            }
        }
        if !counts_ok {
            self.text("FAIL: world counts differ from 3, 4, 2")?;
            return Ok(EXIT_FALSE);
        }
        match failed {
            Some(text) => {
                self.text(format!("first failing formula: {text}"))?;
                Ok(EXIT_FALSE)
            }
            None => {
                self.text("all assertions hold")?;
                Ok(EXIT_TRUE)
            }
        }
    }
}
