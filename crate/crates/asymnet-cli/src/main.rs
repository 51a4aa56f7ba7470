//! Command-line interface for validating, querying and converting
//! probabilistic network models.
//!
//! Exit codes: 0 success, 1 validation failure, 2 inconsistent evidence,
//! 3 I/O or parse failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use asymnet::{
    convert_to_multinet, marginal_counted, parse_document, parse_model, reconstruct_joint,
    recover_priors, redundancy_report, serialize_model, Assignment, DiscreteNetwork, Error,
    HypothesisSpace, JointTable, ModelDocument, QueryResult,
};

#[derive(Parser)]
#[command(
    name = "asymnet",
    about = "Discrete Bayesian networks, multinets and similarity networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model file and print its validation report.
    Validate { file: PathBuf },
    /// Compute the posterior over the hypothesis points given evidence.
    Query {
        file: PathBuf,
        /// Clue evidence, e.g. g=male,b=yes
        #[arg(long, default_value = "")]
        evidence: String,
        /// Evidence for the prior network of staged inference.
        #[arg(long = "apriori-evidence", default_value = "")]
        apriori_evidence: String,
        /// Prior network file for staged inference (multinet models).
        #[arg(long)]
        priors: Option<PathBuf>,
        /// Hypothesis variable ids for plain network models, comma-separated.
        #[arg(long)]
        hypothesis: Option<String>,
    },
    /// Convert a similarity network into a multinet.
    Convert {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Flatten a multinet into a single network over the union of its arcs.
    Union {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the model's stored-parameter count (similarity networks are
    /// counted through their multinet conversion).
    Params { file: PathBuf },
    /// Check two models for joint equivalence and compare query costs.
    Compare {
        file_a: PathBuf,
        file_b: PathBuf,
        /// Also check each model's own query route against its enumerated
        /// joint.
        #[arg(long)]
        oracle: bool,
        /// Evidence for the cost comparison, e.g. g=male,b=yes
        #[arg(long, default_value = "")]
        evidence: String,
        /// Hypothesis variable ids for plain network models.
        #[arg(long)]
        hypothesis: Option<String>,
    },
    /// Recover the hypothesis priors encoded by a similarity network.
    Priors { file: PathBuf },
    /// List parameters specified by more than one local network.
    Redundancy { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Command-line parse failures share the I/O-or-parse exit code.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[derive(Debug)]
enum CliError {
    Model(Error),
    Io(std::io::Error, PathBuf),
    Usage(String),
    /// Failure already reported on stdout (validation, equivalence, oracle).
    Reported,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e, path) => write!(f, "{}: {e}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Reported => write!(f, "check failed (details above)"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Io(..) => 3,
        CliError::Usage(_) => 3,
        CliError::Reported => 1,
        CliError::Model(Error::Parse(_)) | CliError::Model(Error::Schema { .. }) => 3,
        CliError::Model(Error::InconsistentEvidence(_))
        | CliError::Model(Error::UndefinedLikelihood(_))
        | CliError::Model(Error::UndefinedConditional(_)) => 2,
        CliError::Model(_) => 1,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Query {
            file,
            evidence,
            apriori_evidence,
            priors,
            hypothesis,
        } => query(
            &file,
            &evidence,
            &apriori_evidence,
            priors.as_deref(),
            hypothesis,
        ),
        Command::Convert { file, output } => convert(&file, &output),
        Command::Union { file, output } => union(&file, &output),
        Command::Params { file } => params(&file),
        Command::Compare {
            file_a,
            file_b,
            oracle,
            evidence,
            hypothesis,
        } => compare(&file_a, &file_b, oracle, &evidence, hypothesis),
        Command::Priors { file } => priors_cmd(&file),
        Command::Redundancy { file } => redundancy(&file),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(e, path.to_owned()))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(e, path.to_owned()))
}

fn load(path: &Path) -> Result<ModelDocument, CliError> {
    Ok(parse_model(&read(path)?)?)
}

fn validate(file: &Path) -> Result<(), CliError> {
    let doc = parse_document(&read(file)?)?;
    let report = doc.validate();
    println!("{report}");
    if report.is_empty() {
        Ok(())
    } else {
        Err(CliError::Reported)
    }
}

/// Parse `var=label,var=label` evidence against a variable-definition lookup.
fn parse_evidence(
    spec: &str,
    lookup: &dyn Fn(&str) -> Option<Vec<String>>,
) -> Result<Assignment, CliError> {
    let mut assignment = Assignment::new();
    for pair in spec.split(',').filter(|p| !p.is_empty()) {
        let Some((var, label)) = pair.split_once('=') else {
            return Err(CliError::Usage(format!(
                "evidence {pair:?} is not of the form variable=value"
            )));
        };
        let Some(values) = lookup(var) else {
            return Err(CliError::Usage(format!("unknown evidence variable {var:?}")));
        };
        let Some(index) = values.iter().position(|v| v == label) else {
            return Err(CliError::Usage(format!(
                "variable {var:?} has no value {label:?} (values: {})",
                values.join(", ")
            )));
        };
        assignment.bind(var, index);
    }
    Ok(assignment)
}

fn network_lookup(net: &DiscreteNetwork) -> impl Fn(&str) -> Option<Vec<String>> + '_ {
    |var| net.variable(var).map(|v| v.values().to_vec())
}

fn hypothesis_space_for(
    net: &DiscreteNetwork,
    hypothesis: Option<String>,
) -> Result<HypothesisSpace, CliError> {
    let Some(spec) = hypothesis else {
        return Err(CliError::Usage(
            "plain network models need --hypothesis <id>[,<id>...] to name the \
             hypothesis variables"
                .into(),
        ));
    };
    let vars = spec
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|id| {
            net.variable(id)
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("unknown hypothesis variable {id:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HypothesisSpace::new(vars)?)
}

/// Posterior over the hypothesis space read off a conditioned joint table.
fn joint_posterior(
    joint: &JointTable,
    space: &HypothesisSpace,
    evidence: &Assignment,
) -> Result<Vec<f64>, CliError> {
    let conditioned = joint.condition(evidence)?;
    let marginal = conditioned.marginalize(&space.var_ids())?;
    Ok(marginal.values().to_vec())
}

fn query(
    file: &Path,
    evidence: &str,
    apriori_evidence: &str,
    priors: Option<&Path>,
    hypothesis: Option<String>,
) -> Result<(), CliError> {
    let result = match load(file)? {
        ModelDocument::Network(net) => {
            let space = hypothesis_space_for(&net, hypothesis)?;
            let e = parse_evidence(evidence, &network_lookup(&net))?;
            if !apriori_evidence.is_empty() || priors.is_some() {
                return Err(CliError::Usage(
                    "staged inference applies to multinet models only".into(),
                ));
            }
            let posterior = marginal_counted(&net, &space.var_ids(), &e)?;
            let ordered = posterior.factor.reordered(&space.var_ids())?;
            QueryResult::new(&space, &ordered, posterior.multiplications, Vec::new())
        }
        ModelDocument::Multinet(m) => {
            let e = parse_evidence(evidence, &network_lookup(&m.locals()[0]))?;
            let posterior = if let Some(prior_path) = priors {
                let prior_net = match load(prior_path)? {
                    ModelDocument::Network(n) => n,
                    other => {
                        return Err(CliError::Usage(format!(
                            "--priors must be a network file, found {}",
                            other.kind()
                        )))
                    }
                };
                let apriori = parse_evidence(apriori_evidence, &network_lookup(&prior_net))?;
                m.staged_posterior(&prior_net, &apriori, &e)?
            } else {
                if !apriori_evidence.is_empty() {
                    return Err(CliError::Usage(
                        "--apriori-evidence needs --priors <network-file>".into(),
                    ));
                }
                m.posterior(&e)?
            };
            QueryResult::new(
                m.hypothesis(),
                &posterior.factor,
                posterior.multiplications,
                Vec::new(),
            )
        }
        ModelDocument::Simnet(s) => {
            if !apriori_evidence.is_empty() || priors.is_some() {
                return Err(CliError::Usage(
                    "staged inference applies to multinet models only".into(),
                ));
            }
            let lookup = |var: &str| s.universe_var(var).map(|v| v.values().to_vec());
            let e = parse_evidence(evidence, &lookup)?;
            let (joint, multiplications) = asymnet::simnet::reconstruct_joint_counted(&s)?;
            let values = joint_posterior(&joint, s.space(), &e)?;
            let factor = asymnet::Factor::new(s.space().var_ids(), s.space().cards(), values)?;
            QueryResult::new(s.space(), &factor, multiplications, Vec::new())
        }
    };
    println!("{result}");
    Ok(())
}

fn convert(file: &Path, output: &Path) -> Result<(), CliError> {
    let ModelDocument::Simnet(s) = load(file)? else {
        return Err(CliError::Usage("convert expects a simnet file".into()));
    };
    let m = convert_to_multinet(&s)?;
    write(output, &serialize_model(&ModelDocument::Multinet(m)))?;
    println!("wrote {}", output.display());
    Ok(())
}

fn union(file: &Path, output: &Path) -> Result<(), CliError> {
    let ModelDocument::Multinet(m) = load(file)? else {
        return Err(CliError::Usage("union expects a multinet file".into()));
    };
    let flattened = m.union_network()?;
    for w in &flattened.warnings {
        eprintln!("warning: {w}");
    }
    write(
        output,
        &serialize_model(&ModelDocument::Network(flattened.network)),
    )?;
    println!("wrote {}", output.display());
    Ok(())
}

fn params(file: &Path) -> Result<(), CliError> {
    let count = match load(file)? {
        ModelDocument::Network(net) => net.free_parameter_count(),
        ModelDocument::Multinet(m) => m.parameter_count(),
        ModelDocument::Simnet(s) => convert_to_multinet(&s)?.parameter_count(),
    };
    println!("{count}");
    Ok(())
}

/// The full joint a model denotes, for equivalence checks.
fn model_joint(doc: &ModelDocument) -> Result<JointTable, CliError> {
    Ok(match doc {
        ModelDocument::Network(net) => net.enumerate_joint()?,
        ModelDocument::Multinet(m) => m.union_network()?.network.enumerate_joint()?,
        ModelDocument::Simnet(s) => reconstruct_joint(s)?,
    })
}

/// The hypothesis space a model carries, if any.
fn model_space(doc: &ModelDocument) -> Option<HypothesisSpace> {
    match doc {
        ModelDocument::Network(_) => None,
        ModelDocument::Multinet(m) => Some(m.hypothesis().clone()),
        ModelDocument::Simnet(s) => Some(s.space().clone()),
    }
}

/// Posterior and multiplication count via the model's own query route.
fn route_posterior(
    doc: &ModelDocument,
    space: &HypothesisSpace,
    evidence: &Assignment,
) -> Result<(Vec<f64>, u64), CliError> {
    match doc {
        ModelDocument::Network(net) => {
            let p = marginal_counted(net, &space.var_ids(), evidence)?;
            let ordered = p.factor.reordered(&space.var_ids())?;
            Ok((ordered.values().to_vec(), p.multiplications))
        }
        ModelDocument::Multinet(m) => {
            let p = m.posterior(evidence)?;
            Ok((p.factor.values().to_vec(), p.multiplications))
        }
        ModelDocument::Simnet(s) => {
            let (joint, mults) = asymnet::simnet::reconstruct_joint_counted(s)?;
            Ok((joint_posterior(&joint, space, evidence)?, mults))
        }
    }
}

fn compare(
    file_a: &Path,
    file_b: &Path,
    oracle: bool,
    evidence: &str,
    hypothesis: Option<String>,
) -> Result<(), CliError> {
    let a = load(file_a)?;
    let b = load(file_b)?;
    let joint_a = model_joint(&a)?;
    let joint_b = model_joint(&b)?;
    let difference = joint_a.max_abs_difference(&joint_b).map_err(|_| {
        CliError::Model(Error::Contract(
            "the two models are over different variables".into(),
        ))
    })?;
    let equivalent = difference <= 1e-9;
    println!("max joint difference: {difference:e}");
    println!("equivalent: {}", if equivalent { "yes" } else { "no" });

    // Cost comparison needs a hypothesis space; take it from either model,
    // or from --hypothesis when both are plain networks.
    let space = match model_space(&a).or_else(|| model_space(&b)) {
        Some(space) => Some(space),
        None => {
            if hypothesis.is_some() {
                if let ModelDocument::Network(net) = &a {
                    Some(hypothesis_space_for(net, hypothesis)?)
                } else {
                    None
                }
            } else {
                None
            }
        }
    };
    if let Some(space) = space {
        let lookup = |var: &str| -> Option<Vec<String>> {
            joint_a
                .scope()
                .iter()
                .find(|v| v.id().as_str() == var)
                .map(|v| v.values().to_vec())
        };
        let e = parse_evidence(evidence, &lookup)?;
        let (post_a, cost_a) = route_posterior(&a, &space, &e)?;
        let (post_b, cost_b) = route_posterior(&b, &space, &e)?;
        println!("multiplications {}: {cost_a}", file_a.display());
        println!("multiplications {}: {cost_b}", file_b.display());
        if oracle {
            for (label, doc, joint, post) in
                [("A", &a, &joint_a, &post_a), ("B", &b, &joint_b, &post_b)]
            {
                let reference = joint_posterior(joint, &space, &e)?;
                let gap = post
                    .iter()
                    .zip(&reference)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max);
                println!(
                    "oracle check {label} ({}): {} (max difference {gap:e})",
                    doc.kind(),
                    if gap <= 1e-9 { "ok" } else { "FAILED" }
                );
                if gap > 1e-9 {
                    return Err(CliError::Reported);
                }
            }
        }
    }
    if equivalent {
        Ok(())
    } else {
        Err(CliError::Reported)
    }
}

fn priors_cmd(file: &Path) -> Result<(), CliError> {
    let ModelDocument::Simnet(s) = load(file)? else {
        return Err(CliError::Usage("priors expects a simnet file".into()));
    };
    let priors = recover_priors(&s)?;
    let space = s.space();
    for (point, &p) in space.points().iter().zip(priors.values()) {
        println!("{} {p}", space.label(point));
    }
    Ok(())
}

fn redundancy(file: &Path) -> Result<(), CliError> {
    let ModelDocument::Simnet(s) = load(file)? else {
        return Err(CliError::Usage("redundancy expects a simnet file".into()));
    };
    let report = redundancy_report(&s)?;
    if report.entries.is_empty() {
        println!("no shared parameters");
    }
    for entry in &report.entries {
        println!("{}", entry.describe(&s));
    }
    let coherent = !report.incoherent();
    println!("coherent: {}", if coherent { "yes" } else { "no" });
    if coherent {
        Ok(())
    } else {
        Err(CliError::Reported)
    }
}
