use std::time::Instant;

use anyhow::{bail, Context, Result};
use featattr_core::cgt::CgtConfig;
use featattr_core::explanations::{
    axps_from_cxps, check_waxp, enumerate_cxps, extract_axp, extract_cxp, relevant_features,
};
use featattr_core::games::check_compliance;
use featattr_core::io::report::{ExplanationList, InstanceComparison, ProblemSummary};
use featattr_core::io::{load_model, load_sample, parse_instance, LoadedModel, RunReport, Task};
use featattr_core::ranking::{
    compare_scores, compute_scores, rank_features, summarize_batch, LabelledScores, RankMode,
    RboParams, ScoreMethod,
};
use featattr_core::rational::{format_rational, parse_rational};
use featattr_core::{ExplanationProblem, FeatureSet, GameKind, SimilarityConfig, Universe};

use crate::args::{
    Cli, Command, CommonArgs, CompareArgs, EnumerateArgs, ExtractArgs, GameArg, KindArg, MethodArg,
    OutputFormat, ProblemArgs, SamplingArgs, ShapArgs,
};
use crate::render;

/// Runs one subcommand and returns the text to print.
pub fn run(cli: &Cli) -> Result<String> {
    let start = Instant::now();
    let (mut report, common) = match &cli.command {
        Command::Validate(a) => {
            let session = Session::open(&a.common)?;
            let problem = a
                .instance
                .as_deref()
                .map(|i| session.problem(i))
                .transpose()?;
            let mut report = RunReport::new("validate", session.summary(problem.as_ref()));
            report.valid = Some(true);
            (report, &a.common)
        }
        Command::Relevancy(a) => (relevancy(a)?, &a.common),
        Command::Axp(a) => (extract(a, KindArg::Axp)?, &a.problem.common),
        Command::Cxp(a) => (extract(a, KindArg::Cxp)?, &a.problem.common),
        Command::Enumerate(a) => (enumerate(a)?, &a.problem.common),
        Command::Shap(a) => (shap(a)?, &a.problem.common),
        Command::Compare(a) => (compare(a)?, &a.common),
    };
    if common.timing {
        report.elapsed_ms = Some(u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX));
    }
    Ok(match common.output {
        OutputFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
        OutputFormat::Table => {
            let mode = match &cli.command {
                Command::Compare(a) if a.abs => RankMode::Absolute,
                _ => RankMode::Signed,
            };
            render::table(&report, mode)
        }
    })
}

/// A loaded model with the similarity and universe chosen on the command line.
struct Session {
    loaded: LoadedModel,
    /// `None` only for a regression model opened without `--delta`.
    similarity: Option<SimilarityConfig>,
    universe: Universe,
}

impl Session {
    fn open(common: &CommonArgs) -> Result<Self> {
        let loaded = load_model(&common.model)
            .with_context(|| format!("loading model {}", common.model.display()))?;
        let delta = common
            .delta
            .as_deref()
            .map(parse_rational)
            .transpose()
            .context("parsing --delta")?;
        let similarity = match (loaded.task, delta) {
            (Task::Classification, None) => Some(SimilarityConfig::ClassEquality),
            (Task::Classification, Some(_)) => {
                bail!("--delta applies to regression models only; this model is a classifier")
            }
            (Task::Regression, Some(d)) => Some(SimilarityConfig::threshold(d)?),
            (Task::Regression, None) => None,
        };
        let universe = match &common.sample {
            Some(path) if common.agnostic => Universe::ModelAgnostic(
                load_sample(path, &loaded.model)
                    .with_context(|| format!("loading sample {}", path.display()))?,
            ),
            _ => Universe::ModelAware,
        };
        Ok(Session {
            loaded,
            similarity,
            universe,
        })
    }

    fn problem(&self, instance: &str) -> Result<ExplanationProblem> {
        let Some(similarity) = &self.similarity else {
            bail!("--delta is required for regression models");
        };
        let point = parse_instance(self.loaded.model.space(), instance)
            .with_context(|| format!("parsing --instance {instance:?}"))?;
        Ok(ExplanationProblem::new(
            self.loaded.model.clone(),
            point,
            similarity.clone(),
        )?)
    }

    fn summary(&self, problem: Option<&ExplanationProblem>) -> ProblemSummary {
        let model = &self.loaded.model;
        ProblemSummary {
            model_kind: model.kind_name().to_string(),
            features: model
                .space()
                .features()
                .iter()
                .map(|f| f.name.clone())
                .collect(),
            instance: problem
                .map(|p| p.instance().point().iter().map(format_rational).collect())
                .unwrap_or_default(),
            prediction: problem.map(|p| p.instance().prediction().to_string()),
            similarity: match &self.similarity {
                Some(SimilarityConfig::ClassEquality) => "class_equality".into(),
                Some(SimilarityConfig::RegressionThreshold { .. }) => "threshold".into(),
                None => "unspecified".into(),
            },
            delta: self
                .similarity
                .as_ref()
                .and_then(|s| s.delta())
                .map(format_rational),
            universe: match &self.universe {
                Universe::ModelAware => "model_aware".into(),
                Universe::ModelAgnostic(_) => "model_agnostic".into(),
            },
            sample_rows: match &self.universe {
                Universe::ModelAware => None,
                Universe::ModelAgnostic(s) => Some(s.len()),
            },
        }
    }

    fn start(&self, command: &str, args: &ProblemArgs) -> Result<(ExplanationProblem, RunReport)> {
        let problem = self.problem(&args.instance)?;
        let report = RunReport::new(command, self.summary(Some(&problem)));
        Ok((problem, report))
    }
}

fn relevancy(a: &ProblemArgs) -> Result<RunReport> {
    let session = Session::open(&a.common)?;
    let (problem, mut report) = session.start("relevancy", a)?;
    report.relevant = Some(relevant_features(&problem, &session.universe)?);
    Ok(report)
}

fn extract(a: &ExtractArgs, kind: KindArg) -> Result<RunReport> {
    let session = Session::open(&a.problem.common)?;
    let name = match kind {
        KindArg::Axp => "axp",
        KindArg::Cxp => "cxp",
    };
    let (problem, mut report) = session.start(name, &a.problem)?;
    let m = problem.num_features();
    let seed = match &a.from {
        Some(ids) => parse_ids(ids, m)?,
        None => FeatureSet::full(m),
    };
    let set = match kind {
        KindArg::Axp => extract_axp(&problem, &session.universe, seed)?,
        KindArg::Cxp => extract_cxp(&problem, &session.universe, seed)?,
    };
    if kind == KindArg::Axp {
        flag_vacuous(&session, &problem, &[set], &mut report);
    }
    report.explanations = Some(ExplanationList {
        kind: name.into(),
        sets: vec![set],
        constant: false,
    });
    Ok(report)
}

fn enumerate(a: &EnumerateArgs) -> Result<RunReport> {
    let session = Session::open(&a.problem.common)?;
    let (problem, mut report) = session.start("enumerate", &a.problem)?;
    let cxps = enumerate_cxps(&problem, &session.universe)?;
    let (name, sets) = match a.kind {
        KindArg::Cxp => ("cxp", cxps.cxps),
        KindArg::Axp if cxps.constant => ("axp", vec![FeatureSet::empty()]),
        KindArg::Axp => ("axp", axps_from_cxps(&cxps.cxps)?),
    };
    if a.kind == KindArg::Axp {
        flag_vacuous(&session, &problem, &sets, &mut report);
    }
    if cxps.constant {
        report
            .warnings
            .push("the prediction is constant over the universe".into());
    }
    report.explanations = Some(ExplanationList {
        kind: name.into(),
        sets,
        constant: cxps.constant,
    });
    Ok(report)
}

/// A sampled WAXp that no sample row matches holds only vacuously.
fn flag_vacuous(
    session: &Session,
    problem: &ExplanationProblem,
    axps: &[FeatureSet],
    report: &mut RunReport,
) {
    for &s in axps {
        if check_waxp(problem, &session.universe, s).vacuous {
            report.warnings.push(format!(
                "{s} holds vacuously: no sample row agrees with the instance on it"
            ));
        }
    }
}

fn game_kind(g: GameArg) -> GameKind {
    match g {
        GameArg::Expected => GameKind::ExpectedValue,
        GameArg::Waxp => GameKind::WaxpBased,
    }
}

fn cgt_config(s: &SamplingArgs) -> Result<CgtConfig> {
    let epsilon = parse_rational(&s.epsilon).context("parsing --epsilon")?;
    let alpha = parse_rational(&s.alpha).context("parsing --alpha")?;
    let mut config = CgtConfig::new(epsilon, alpha, s.seed)?;
    config.samples = s.samples;
    config.validate()?;
    Ok(config)
}

fn labelled(label: String, scores: featattr_core::ScoreVector) -> LabelledScores {
    LabelledScores {
        label,
        signed: rank_features(&scores, RankMode::Signed),
        absolute: rank_features(&scores, RankMode::Absolute),
        scores,
    }
}

fn agnostic_warning(session: &Session, kind: GameKind, report: &mut RunReport) {
    if kind == GameKind::ExpectedValue && matches!(session.universe, Universe::ModelAgnostic(_)) {
        report.warnings.push(
            "the expected-value game uses the uniform distribution over the feature space; the sample only affects WAXp-based quantities"
                .into(),
        );
    }
}

fn shap(a: &ShapArgs) -> Result<RunReport> {
    let session = Session::open(&a.problem.common)?;
    let (problem, mut report) = session.start("shap", &a.problem)?;
    let kind = game_kind(a.game);
    let method = match a.method {
        MethodArg::Exact => ScoreMethod::Exact(kind),
        MethodArg::Cgt => ScoreMethod::Cgt(kind, cgt_config(&a.sampling)?),
    };
    let (scores, diagnostics) = compute_scores(&problem, &session.universe, &method)?;
    if a.method == MethodArg::Exact {
        let compliance = check_compliance(&problem, &session.universe, &scores)?;
        report.relevant = Some(compliance.relevant);
        report.compliance = Some(compliance);
    }
    agnostic_warning(&session, kind, &mut report);
    report.scores.push(labelled(method.label(), scores));
    report.cgt = diagnostics;
    Ok(report)
}

fn parse_methods(list: &str, sampling: &SamplingArgs) -> Result<Vec<ScoreMethod>> {
    let mut methods = Vec::new();
    for item in list.split(',').map(str::trim) {
        let (game, method) = item
            .split_once('/')
            .with_context(|| format!("method {item:?} is not of the form game/method"))?;
        let kind = match game {
            "expected" => GameKind::ExpectedValue,
            "waxp" => GameKind::WaxpBased,
            other => bail!("unknown game {other:?} (expected \"expected\" or \"waxp\")"),
        };
        methods.push(match method {
            "exact" => ScoreMethod::Exact(kind),
            "cgt" => ScoreMethod::Cgt(kind, cgt_config(sampling)?),
            other => bail!("unknown method {other:?} (expected \"exact\" or \"cgt\")"),
        });
    }
    if methods.len() < 2 {
        bail!("--methods needs at least two entries to compare");
    }
    Ok(methods)
}

fn compare(a: &CompareArgs) -> Result<RunReport> {
    let session = Session::open(&a.common)?;
    let methods = parse_methods(&a.methods, &a.sampling)?;
    let params = RboParams {
        persistence: parse_rational(&a.persistence).context("parsing --persistence")?,
        depth: a.depth,
    };
    params.validate()?;
    let mut report: Option<RunReport> = None;
    let mut comparisons = Vec::new();
    for instance in &a.instance {
        let problem = session.problem(instance)?;
        let comparison = compare_scores(&problem, &session.universe, &methods, &params)?;
        let r = report
            .get_or_insert_with(|| RunReport::new("compare", session.summary(Some(&problem))));
        r.comparisons.push(InstanceComparison {
            instance: problem
                .instance()
                .point()
                .iter()
                .map(format_rational)
                .collect(),
            comparison: comparison.clone(),
        });
        comparisons.push(comparison);
    }
    let mut report = report.context("no instance given")?;
    if methods.iter().any(|m| {
        matches!(
            m,
            ScoreMethod::Exact(GameKind::ExpectedValue)
                | ScoreMethod::Cgt(GameKind::ExpectedValue, _)
        )
    }) {
        agnostic_warning(&session, GameKind::ExpectedValue, &mut report);
    }
    report.batch = Some(summarize_batch(&comparisons));
    Ok(report)
}

fn parse_ids(text: &str, m: usize) -> Result<FeatureSet> {
    let ids = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("feature id {t:?}"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FeatureSet::from_ids(ids, m)?)
}
