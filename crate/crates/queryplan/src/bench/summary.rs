//! Metric aggregation and the fixed-column output formats. All floating
//! point values are formatted with fixed precision so identical runs produce
//! identical bytes.

use std::collections::BTreeMap;

use super::RunRecord;

/// Query-count histogram for one planner: bin `i` counts runs that used
/// exactly `i` WMQs, for `0..=cap`. Failed runs are capped at the budget, so
/// they land in the top bin.
#[derive(Debug, Clone)]
pub struct WmqHistogram {
    pub planner_id: String,
    pub cap: u32,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct PlannerSummary {
    pub planner_id: String,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Normal-approximation binomial standard error sqrt(p(1-p)/n).
    pub success_se: f64,
    /// Mean WMQ with failures counted at the budget cap.
    pub mean_wmq: f64,
    /// Among runs whose optimum is known: fraction solved at optimal length.
    pub optimality_rate: f64,
    pub mean_llm_calls: f64,
    pub mean_prompt_tokens: f64,
    pub mean_completion_tokens: f64,
}

#[derive(Debug, Clone)]
pub struct SuiteSummary {
    pub planners: Vec<PlannerSummary>,
    pub histograms: Vec<WmqHistogram>,
}

/// Aggregate records per planner. `budget` of `None` means uncapped runs:
/// failures then contribute their actual query counts and no histogram is
/// produced.
pub fn summarize(records: &[RunRecord], budget: Option<u32>) -> SuiteSummary {
    let mut by_planner: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for record in records {
        by_planner
            .entry(&record.planner_id)
            .or_default()
            .push(record);
    }
    let mut planners = Vec::new();
    let mut histograms = Vec::new();
    for (planner_id, group) in &by_planner {
        let runs = group.len();
        let successes = group.iter().filter(|r| r.success).count();
        let p = successes as f64 / runs as f64;
        let se = (p * (1.0 - p) / runs as f64).sqrt();
        let capped_wmq = |r: &RunRecord| -> u64 {
            match (r.success, budget) {
                (false, Some(cap)) => u64::from(cap),
                _ => r.wmq_used,
            }
        };
        let mean_wmq = group.iter().map(|r| capped_wmq(r) as f64).sum::<f64>() / runs as f64;
        let with_optimum: Vec<&&RunRecord> = group
            .iter()
            .filter(|r| r.optimal_length.is_some())
            .collect();
        let optimality_rate = if with_optimum.is_empty() {
            0.0
        } else {
            with_optimum
                .iter()
                .filter(|r| r.optimal == Some(true))
                .count() as f64
                / with_optimum.len() as f64
        };
        let mean =
            |f: fn(&RunRecord) -> u64| group.iter().map(|r| f(r) as f64).sum::<f64>() / runs as f64;
        planners.push(PlannerSummary {
            planner_id: planner_id.to_string(),
            runs,
            successes,
            success_rate: p,
            success_se: se,
            mean_wmq,
            optimality_rate,
            mean_llm_calls: mean(|r| r.llm_calls),
            mean_prompt_tokens: mean(|r| r.prompt_tokens),
            mean_completion_tokens: mean(|r| r.completion_tokens),
        });
        if let Some(cap) = budget {
            let mut counts = vec![0u64; cap as usize + 1];
            for record in group {
                let bin = capped_wmq(record).min(u64::from(cap)) as usize;
                counts[bin] += 1;
            }
            histograms.push(WmqHistogram {
                planner_id: planner_id.to_string(),
                cap,
                counts,
            });
        }
    }
    SuiteSummary {
        planners,
        histograms,
    }
}

fn opt_str<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(|v| v.to_string()).unwrap_or_default()
}

/// Records as line-delimited JSON, one record per line, full fields.
pub fn records_jsonl(records: &[RunRecord]) -> String {
    let mut out = String::new();
    for record in records {
        out.push_str(&serde_json::to_string(record).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Records CSV with a fixed column order. Wall time is deliberately absent:
/// replayed suites must be byte-identical.
pub fn records_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "problem_id,planner_id,seed,success,optimal,wmq_used,plan_length,optimal_length,llm_calls,prompt_tokens,completion_tokens,malformed_actions,history_truncated,failure_reason\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.problem_id,
            r.planner_id,
            r.seed,
            r.success,
            opt_str(&r.optimal),
            r.wmq_used,
            opt_str(&r.plan_length),
            opt_str(&r.optimal_length),
            r.llm_calls,
            r.prompt_tokens,
            r.completion_tokens,
            r.malformed_actions,
            r.history_truncated,
            r.failure_reason.map(|f| f.to_string()).unwrap_or_default(),
        ));
    }
    out
}

pub fn summary_csv(summary: &SuiteSummary) -> String {
    let mut out = String::from(
        "planner_id,runs,successes,success_rate,success_se,mean_wmq,optimality_rate,mean_llm_calls,mean_prompt_tokens,mean_completion_tokens\n",
    );
    for p in &summary.planners {
        out.push_str(&format!(
            "{},{},{},{:.4},{:.4},{:.2},{:.4},{:.2},{:.2},{:.2}\n",
            p.planner_id,
            p.runs,
            p.successes,
            p.success_rate,
            p.success_se,
            p.mean_wmq,
            p.optimality_rate,
            p.mean_llm_calls,
            p.mean_prompt_tokens,
            p.mean_completion_tokens,
        ));
    }
    out
}

pub fn histogram_csv(summary: &SuiteSummary) -> String {
    let mut out = String::from("planner_id,wmq,count\n");
    for h in &summary.histograms {
        for (bin, count) in h.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", h.planner_id, bin, count));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planners::FailureReason;

    fn record(
        planner: &str,
        success: bool,
        wmq: u64,
        plan: Option<usize>,
        optimal_length: Option<usize>,
    ) -> RunRecord {
        RunRecord {
            problem_id: "p".into(),
            planner_id: planner.into(),
            seed: 0,
            success,
            optimal: match (plan, optimal_length) {
                (Some(p), Some(o)) => Some(success && p == o),
                _ => None,
            },
            wmq_used: wmq,
            plan_length: plan,
            optimal_length,
            llm_calls: 2,
            prompt_tokens: 100,
            completion_tokens: 10,
            malformed_actions: 0,
            history_truncated: false,
            failure_reason: if success {
                None
            } else {
                Some(FailureReason::BudgetExhausted)
            },
            wall_time_ms: 1,
        }
    }

    #[test]
    fn failures_count_at_the_cap_and_land_in_the_cap_bin() {
        let records = vec![
            record("a", true, 4, Some(4), Some(4)),
            record("a", false, 9, None, Some(4)),
        ];
        let summary = summarize(&records, Some(20));
        let a = &summary.planners[0];
        assert_eq!(a.successes, 1);
        assert!((a.mean_wmq - 12.0).abs() < 1e-9, "mean of 4 and capped 20");
        let h = &summary.histograms[0];
        assert_eq!(h.counts.iter().sum::<u64>(), 2, "histogram conserves runs");
        assert_eq!(h.counts[4], 1);
        assert_eq!(h.counts[20], 1, "failure lands in the cap bin");
    }

    #[test]
    fn optimality_rate_is_over_known_optima() {
        let records = vec![
            record("a", true, 4, Some(4), Some(4)),
            record("a", true, 6, Some(6), Some(4)),
            record("a", true, 3, Some(3), None),
        ];
        let summary = summarize(&records, Some(20));
        assert!((summary.planners[0].optimality_rate - 0.5).abs() < 1e-9);
    }

    #[test]
    fn csv_output_is_stable() {
        let records = vec![record("a", true, 4, Some(4), Some(4))];
        let summary = summarize(&records, Some(20));
        assert_eq!(records_csv(&records), records_csv(&records));
        assert_eq!(summary_csv(&summary), summary_csv(&summary));
        assert!(records_csv(&records).starts_with("problem_id,planner_id,seed,"));
        assert!(!records_csv(&records).contains("wall_time"));
    }
}
