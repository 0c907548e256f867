//! Evaluation protocol: classification and retrieval metrics,
//! leave-one-block-out cross-validation and label-permutation tests.

mod judgments;
mod metrics;
mod protocol;

pub use judgments::{judgments_to_jsonl, read_judgments, DocumentJudgments, JudgmentRecord, JudgmentSet};
pub use metrics::{auc, cumulative_gain, gain_at, permutation_p_value, precision, weighted_precision};
pub use protocol::{
    evaluate_participant, leave_one_block_out, permutation_test_classification, permutation_test_retrieval,
    run_block, BlockOutcome, BlockResult, EvaluationParams, ExperimentBlock, ParticipantData,
    ParticipantEvaluation, PermutationTest, Prepared, ResultRow, CG_DEPTHS,
};
