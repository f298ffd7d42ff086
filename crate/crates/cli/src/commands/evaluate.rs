//! `evaluate`: rank a stored plan against an anchor file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use otalign::checkpoint::read_plan;
use otalign::graph::load_anchors;
use otalign::metrics::{alignment_metrics, compute_ranks, compute_ranks_pessimistic};
use otalign::Error;

use crate::commands::{Stage, StageExt, StagedError};

pub fn run(
    plan_path: &Path,
    anchors_path: &Path,
    ks: &[usize],
    pessimistic: bool,
    out_path: Option<&Path>,
) -> Result<(), StagedError> {
    if ks.is_empty() {
        return Err(Error::Config("at least one K is required".into())).at(Stage::Config);
    }
    let plan = read_plan(plan_path).at(Stage::Evaluate)?;
    let anchors = load_anchors(anchors_path).at(Stage::Evaluate)?;
    for &(x, y) in anchors.pairs() {
        if x >= plan.n1() || y >= plan.n2() {
            return Err(Error::Range(format!(
                "anchor ({x}, {y}) outside the {}x{} plan",
                plan.n1(),
                plan.n2()
            )))
            .at(Stage::Evaluate);
        }
    }

    let ranks = compute_ranks(plan.values(), &anchors);
    let report = alignment_metrics(&ranks, ks).at(Stage::Evaluate)?;
    let mut lines = Vec::new();
    for (k, h) in &report.hits {
        lines.push(format!("hits@{k} {h:.6}"));
    }
    lines.push(format!("mrr {:.6}", report.mrr));
    if pessimistic {
        let pess = compute_ranks_pessimistic(plan.values(), &anchors);
        let pess_report = alignment_metrics(&pess, ks).at(Stage::Evaluate)?;
        for (k, h) in &pess_report.hits {
            lines.push(format!("pessimistic_hits@{k} {h:.6}"));
        }
        lines.push(format!("pessimistic_mrr {:.6}", pess_report.mrr));
    }
    for line in &lines {
        println!("{line}");
    }

    let out_file = out_path
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| {
            let mut os = plan_path.as_os_str().to_owned();
            os.push(".metrics.txt");
            os.into()
        });
    let write = || -> otalign::Result<()> {
        let mut w = BufWriter::new(File::create(&out_file)?);
        for line in &lines {
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(())
    };
    write().at(Stage::WriteOutputs)?;
    Ok(())
}
