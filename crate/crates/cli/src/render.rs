//! Plain-text rendering of a run report. Scores are shown with six
//! decimals next to their exact value.

use std::fmt::Write;

use featattr_core::games::ViolationKind;
use featattr_core::io::RunReport;
use featattr_core::ranking::{LabelledScores, RankMode};
use featattr_core::rational::{format_decimal, format_rational};
use featattr_core::{FeatureSet, Rational};

const PLACES: usize = 6;

fn dec(r: &Rational) -> String {
    format_decimal(r, PLACES)
}

/// Left-aligned columns separated by two spaces, without trailing blanks.
fn columns(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn named(set: FeatureSet, names: &[String]) -> String {
    let list: Vec<&str> = set.ids().map(|i| names[i - 1].as_str()).collect();
    if list.is_empty() {
        set.to_string()
    } else {
        format!("{set} ({})", list.join(", "))
    }
}

fn order(ranking: &[usize]) -> String {
    ranking
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn scores_table(s: &LabelledScores, names: &[String], out: &mut String) {
    let _ = writeln!(out, "\nscores ({})", s.label);
    let mut rows = vec![vec![
        "feature".into(),
        "name".into(),
        "score".into(),
        "exact".into(),
    ]];
    for (i, v) in s.scores.scores.iter().enumerate() {
        rows.push(vec![
            (i + 1).to_string(),
            names[i].clone(),
            dec(v),
            format_rational(v),
        ]);
    }
    out.push_str(&columns(&rows));
    let _ = writeln!(out, "total: {}", dec(&s.scores.total()));
    let _ = writeln!(out, "ranking (signed): {}", order(&s.signed.order));
    let _ = writeln!(out, "ranking (absolute): {}", order(&s.absolute.order));
}

pub fn table(report: &RunReport, mode: RankMode) -> String {
    let p = &report.problem;
    let names = &p.features;
    let mut out = String::new();
    let mut head = vec![vec![
        "model".into(),
        format!(
            "{}, {} features ({})",
            p.model_kind,
            names.len(),
            names.join(", ")
        ),
    ]];
    if !p.instance.is_empty() {
        let prediction = p.prediction.as_deref().unwrap_or("?");
        head.push(vec![
            "instance".into(),
            format!("({}) -> {prediction}", p.instance.join(", ")),
        ]);
    }
    head.push(vec![
        "similarity".into(),
        match &p.delta {
            Some(d) => format!("{} (delta = {d})", p.similarity),
            None => p.similarity.clone(),
        },
    ]);
    head.push(vec![
        "universe".into(),
        match p.sample_rows {
            Some(n) => format!("{} ({n} rows)", p.universe),
            None => p.universe.clone(),
        },
    ]);
    out.push_str(&columns(&head));

    if report.valid == Some(true) {
        out.push_str("valid\n");
    }
    if let Some(list) = &report.explanations {
        let _ = writeln!(out, "\n{} ({}):", list.kind, list.sets.len());
        for set in &list.sets {
            let _ = writeln!(out, "  {}", named(*set, names));
        }
    }
    for s in &report.scores {
        scores_table(s, names, &mut out);
    }
    if let Some(relevant) = report.relevant {
        let _ = writeln!(out, "\nrelevant: {}", named(relevant, names));
        let irrelevant = relevant.complement(names.len());
        let _ = writeln!(out, "irrelevant: {}", named(irrelevant, names));
    }
    if let Some(c) = &report.compliance {
        if c.violations.is_empty() {
            out.push_str("compliance: ok (zero scores exactly on irrelevant features)\n");
        } else {
            out.push_str("compliance: violated\n");
            for v in &c.violations {
                let what = match v.kind {
                    ViolationKind::IrrelevantNonzero => "irrelevant but scored",
                    ViolationKind::RelevantZero => "relevant but scored zero",
                };
                let _ = writeln!(
                    out,
                    "  feature {} ({}): {what}, score {}",
                    v.feature,
                    names[v.feature - 1],
                    dec(&v.score)
                );
            }
        }
    }
    if let Some(d) = &report.cgt {
        let _ = writeln!(
            out,
            "\nsampling: {} permutations, epsilon {}, alpha {}, range {}, seed {}, {} coalitions evaluated",
            d.samples,
            format_rational(&d.epsilon),
            format_rational(&d.alpha),
            format_rational(&d.value_range),
            d.seed,
            d.coalitions
        );
    }
    let label = match mode {
        RankMode::Signed => "signed",
        RankMode::Absolute => "absolute",
    };
    for ic in &report.comparisons {
        let c = &ic.comparison;
        let _ = writeln!(out, "\ninstance ({})", ic.instance.join(", "));
        let mut rows = vec![vec![
            "method".into(),
            format!("ranking ({label})"),
            "scores".into(),
        ]];
        for m in &c.methods {
            let ranking = match mode {
                RankMode::Signed => &m.signed,
                RankMode::Absolute => &m.absolute,
            };
            let scores: Vec<String> = m.scores.scores.iter().map(dec).collect();
            rows.push(vec![
                m.label.clone(),
                order(&ranking.order),
                scores.join(" "),
            ]);
        }
        out.push_str(&columns(&rows));
        let mut rows = vec![vec!["pair".into(), format!("rbo ({label})")]];
        for pair in &c.pairs {
            let v = match mode {
                RankMode::Signed => &pair.signed,
                RankMode::Absolute => &pair.absolute,
            };
            rows.push(vec![
                format!("{} vs {}", pair.a, pair.b),
                format!("{} ({})", dec(v), format_rational(v)),
            ]);
        }
        out.push_str(&columns(&rows));
        let _ = writeln!(
            out,
            "rbo ceiling {} at persistence {}, depth {}",
            dec(&c.ceiling),
            format_rational(&c.params.persistence),
            c.params.depth
        );
    }
    if let Some(b) = &report.batch {
        if b.instances > 1 {
            let _ = writeln!(out, "\nbatch over {} instances (rbo, {label})", b.instances);
            let mut rows = vec![vec![
                "pair".into(),
                "min".into(),
                "max".into(),
                "mean".into(),
            ]];
            for pair in &b.pairs {
                let s = match mode {
                    RankMode::Signed => &pair.signed,
                    RankMode::Absolute => &pair.absolute,
                };
                rows.push(vec![
                    format!("{} vs {}", pair.a, pair.b),
                    dec(&s.min),
                    dec(&s.max),
                    dec(&s.mean),
                ]);
            }
            out.push_str(&columns(&rows));
        }
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    if let Some(ms) = report.elapsed_ms {
        let _ = writeln!(out, "elapsed: {ms} ms");
    }
    out
}
