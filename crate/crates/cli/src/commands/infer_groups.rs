//! `infer-groups`: institutional and ideological reference partitions per
//! period, fitted on the parties topic.

use serde_json::json;

use polarscope::groups::{
    fit_reference_partitions, infer_partition, label_groups, label_institutional, write_partition,
};

use super::{partition_file, Reference};
use crate::config::LoadedConfig;
use crate::data::Inputs;
use crate::error::{CliError, Result};
use crate::output::{run_metadata, OutputDir};

pub fn infer_groups(cfg: &LoadedConfig, inputs: &Inputs, out: &mut OutputDir) -> Result<()> {
    let c = &cfg.config;
    let parties = inputs.topic_index(&c.parties_topic).map_err(|_| {
        CliError::validation(format!("parties topic `{}` is not defined in any topic config", c.parties_topic))
    })?;
    let options = c.inference();
    let mut details = Vec::new();
    for period in &c.periods {
        let study = period.study_period();
        // references always use every account: the seeds must be present to label groups
        let graph = polarscope::graphs::build_endorsement_graph(
            inputs.in_period(parties, &study).filter(|e| e.is_retweet()),
            None,
        );
        log::info!("{}: parties graph with {} users, {} edges", period.name, graph.node_count(), graph.edges().len());
        let (inst, ideo) = fit_reference_partitions(&graph, c.seed, c.restarts, &options)
            .map_err(|e| CliError::Runtime(format!("period `{}`: {e}", period.name)))?;
        let single = infer_partition(&graph, 1, c.seed, c.restarts, &options)?;
        let inst = label_institutional(&inst, &inputs.seeds, &period.government_parties)
            .map_err(|e| CliError::Runtime(format!("period `{}`, institutional: {e}", period.name)))?;
        let ideo = label_groups(&ideo, &inputs.seeds, &c.bloc_map)
            .map_err(|e| CliError::Runtime(format!("period `{}`, ideological: {e}", period.name)))?;

        let mut fits = serde_json::Map::new();
        for (r, outcome) in [(Reference::Institutional, &inst), (Reference::Ideological, &ideo)] {
            let p = &outcome.partition;
            let margin = p.score() - single.score();
            let meta = [
                ("period", period.name.clone()),
                ("reference", r.name().to_owned()),
                ("objective", c.objective.tag().to_owned()),
                ("prng", polarscope::rng::PRNG_VERSION.to_owned()),
                ("seed", c.seed.to_string()),
                ("restarts", c.restarts.to_string()),
                ("evidence_margin_vs_b1", margin.to_string()),
            ];
            let mut bytes = Vec::new();
            write_partition(p, &meta, &mut bytes)?;
            out.write(partition_file(&period.name, r), &bytes)?;
            let sizes: serde_json::Map<String, serde_json::Value> =
                p.sizes().iter().enumerate().map(|(g, &n)| (p.label(g), json!(n))).collect();
            fits.insert(
                r.name().into(),
                json!({
                    "groups": r.groups(),
                    "score": p.score(),
                    "score_b1": single.score(),
                    "evidence_margin_vs_b1": margin,
                    "sizes": sizes,
                    "warnings": outcome.warnings,
                }),
            );
        }
        details.push(json!({
            "period": period.name,
            "users": graph.node_count(),
            "edges": graph.edges().len(),
            "fits": fits,
        }));
    }
    let meta = run_metadata("infer-groups", cfg, json!({ "periods": details }))?;
    out.write_json("partitions/metadata.json", &meta)
}
