//! `gen-graph` and `decode`.

use std::path::Path;

use serde::Serialize;

use qgt::decoder::{classify, Decoder, Metrics, DEFAULT_MAX_ITERS};
use qgt::graph::{build_graph_with, AugmentedGraph, BuildOptions};
use qgt::model::{compute_syndrome, sample_population, Population, Syndrome};
use qgt::rng::{trial_seed, Stream};

use super::emit;
use crate::config::{merge, percent, require, require_seed, snapshot};
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::{DecodeArgs, GenGraphArgs};

pub fn gen_graph(flags: GenGraphArgs) -> CliResult<()> {
    let args: GenGraphArgs = merge(&flags, flags.config.as_deref())?;
    let seed = require_seed(args.seed)?;
    let mut rec = Recorder::new("gen-graph", snapshot(&args)?, Some(seed));
    let params = args.ensemble.params()?;
    let opts = BuildOptions {
        distinct_bundles_per_test: args.distinct_bundles,
        ..BuildOptions::default()
    };
    let graph = build_graph_with(&params, seed, &opts)?;
    emit(&mut rec, args.out.as_deref(), &format!("{}\n", graph.to_json()))?;
    if let Some(mtx) = &args.mtx {
        rec.write(mtx, &graph.flatten().to_matrix_market())?;
    }
    if let Some(g) = args.gamma {
        let gamma = percent(g, "gamma")?;
        let pop = sample_population(params.n, gamma, trial_seed(seed, 0, Stream::Population));
        if let Some(path) = &args.syndrome_out {
            rec.write(path, &format!("{}\n", compute_syndrome(&graph, &pop)?.to_json()))?;
        }
        if let Some(path) = &args.truth_out {
            rec.write(path, &format!("{}\n", pop.to_json()))?;
        }
    }
    rec.finish()
}

fn read(path: &Path, what: &str) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {what} {}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct DecodeReport {
    converged: bool,
    iterations: usize,
    /// Items with lower bound 1.
    declared: Vec<usize>,
    /// Items whose bounds did not meet.
    unresolved: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Metrics>,
}

pub fn decode(flags: DecodeArgs) -> CliResult<()> {
    let args: DecodeArgs = merge(&flags, flags.config.as_deref())?;
    let mut rec = Recorder::new("decode", snapshot(&args)?, None);
    let graph_path = require(args.graph.clone(), "graph")?;
    let syndrome_path = require(args.syndrome.clone(), "syndrome")?;
    let graph = AugmentedGraph::from_json(&read(&graph_path, "graph")?)?;
    let syndrome = Syndrome::from_json(&read(&syndrome_path, "syndrome")?, &graph)?;
    let truth = match &args.truth {
        Some(p) => {
            let pop = Population::from_json(&read(p, "truth")?)?;
            if pop.len() != graph.params.n {
                return Err(CliError::Usage(format!(
                    "truth has {} items, graph has {}",
                    pop.len(),
                    graph.params.n
                )));
            }
            Some(pop)
        }
        None => None,
    };
    let outcome = Decoder::new(&graph)?.decode(&syndrome, args.max_iters.unwrap_or(DEFAULT_MAX_ITERS))?;
    if !outcome.converged {
        eprintln!(
            "warning: no fixed point within {} iterations; bounds are still valid",
            outcome.iterations
        );
    }
    let report = DecodeReport {
        converged: outcome.converged,
        iterations: outcome.iterations,
        declared: outcome.declared.clone(),
        unresolved: (0..graph.params.n)
            .filter(|&i| !outcome.item_bounds[i].is_resolved())
            .collect(),
        metrics: truth.as_ref().map(|t| classify(&outcome, Some(t))),
    };
    let json = serde_json::to_string_pretty(&report)?;
    emit(&mut rec, args.out.as_deref(), &format!("{json}\n"))?;
    rec.finish()
}
