//! `perturb`: deterministic noise injection on a dataset file.
//!
//! Structural noise reads and writes an edge list; attribute noise reads
//! and writes an attribute CSV. Standalone counterpart of the `noise:` run
//! mode for preparing robustness experiments.

use std::path::Path;

use otalign::graph::{
    inject_noise, load_attributes, load_edge_list, write_dense_csv, write_edge_list, Graph,
    NoiseKind,
};
use otalign::Error;

use crate::commands::{Stage, StageExt, StagedError};

pub fn run(
    input: &Path,
    kind: NoiseKind,
    percent: f64,
    seed: u64,
    output: &Path,
    nodes: Option<usize>,
) -> Result<(), StagedError> {
    match kind {
        NoiseKind::Structural => {
            let edges = load_edge_list(input).at(Stage::LoadData)?;
            let inferred = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
            let n = match nodes {
                Some(n) if n < inferred => {
                    return Err(Error::Range(format!(
                        "--nodes {n} is below the largest edge id ({})",
                        inferred - 1
                    )))
                    .at(Stage::Config);
                }
                Some(n) => n,
                None => inferred,
            };
            let g = Graph::new(n, &edges, None).at(Stage::LoadData)?;
            let noisy = inject_noise(&g, kind, percent, seed).at(Stage::Perturb)?;
            write_edge_list(output, &noisy).at(Stage::WriteOutputs)?;
            println!(
                "structural noise: {} -> {} edges, written to {}",
                g.num_edges(),
                noisy.num_edges(),
                output.display()
            );
        }
        NoiseKind::Attribute => {
            let attrs = load_attributes(input).at(Stage::LoadData)?;
            let n = attrs.nrows();
            let g = Graph::new(n, &[], Some(attrs)).at(Stage::LoadData)?;
            let noisy = inject_noise(&g, kind, percent, seed).at(Stage::Perturb)?;
            write_dense_csv(output, noisy.attributes().expect("attributes present"))
                .at(Stage::WriteOutputs)?;
            println!("attribute noise written to {}", output.display());
        }
    }
    Ok(())
}
