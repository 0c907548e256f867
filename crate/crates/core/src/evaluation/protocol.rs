use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::classifier::{binarize, LdaModel, Shrinkage};
use crate::corpus::TermDocumentMatrix;
use crate::eeg::{extract_features, Epoch, FeatureMatrix, FeatureWindows, Label};
use crate::error::{Error, Result};
use crate::intent::{feedback_or_fallback, linrel_score, select_query, LinRelParams, WeightedTerm};
use crate::retrieval::{rank, RankedList};
use crate::rng::SeedTree;
use crate::stats::mean;

use super::{auc, cumulative_gain, permutation_p_value, precision, weighted_precision, DocumentJudgments, JudgmentSet};

/// Retrieval depths at which cumulative gain is reported.
pub const CG_DEPTHS: [usize; 3] = [10, 20, 30];

/// One reading block: the two documents read and the labeled epochs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentBlock {
    pub id: u32,
    pub relevant_doc: String,
    pub irrelevant_doc: String,
    pub epochs: Vec<Epoch>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticipantData {
    pub id: String,
    pub channel_names: Vec<String>,
    pub fs: f64,
    pub blocks: Vec<ExperimentBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationParams {
    pub shrinkage: Shrinkage,
    pub windows: FeatureWindows,
    pub linrel: LinRelParams,
    pub m_terms: usize,
    pub mu: f64,
    pub depth: usize,
    pub permutations: usize,
    pub seed: u64,
}

impl Default for EvaluationParams {
    fn default() -> Self {
        Self {
            shrinkage: Shrinkage::Analytic,
            windows: FeatureWindows::default(),
            linrel: LinRelParams::default(),
            m_terms: crate::intent::DEFAULT_QUERY_TERMS,
            mu: crate::retrieval::DEFAULT_MU,
            depth: crate::retrieval::DEFAULT_DEPTH,
            permutations: 1000,
            seed: 0,
        }
    }
}

/// Features of every labeled epoch of a participant, with the row range of
/// each block.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub participant: String,
    pub features: FeatureMatrix,
    blocks: Vec<BlockRows>,
}

#[derive(Debug, Clone)]
struct BlockRows {
    id: u32,
    relevant_doc: String,
    irrelevant_doc: String,
    rows: std::ops::Range<usize>,
}

impl Prepared {
    pub fn new(data: &ParticipantData, windows: &FeatureWindows) -> Result<Self> {
        if data.blocks.len() < 2 {
            return Err(Error::TooFewBlocks {
                needed: 2,
                got: data.blocks.len(),
            });
        }
        let mut epochs = Vec::new();
        let mut blocks = Vec::new();
        for b in &data.blocks {
            let start = epochs.len();
            epochs.extend(b.epochs.iter().filter(|e| e.label != Label::Unlabeled).cloned());
            blocks.push(BlockRows {
                id: b.id,
                relevant_doc: b.relevant_doc.clone(),
                irrelevant_doc: b.irrelevant_doc.clone(),
                rows: start..epochs.len(),
            });
        }
        Ok(Self {
            participant: data.id.clone(),
            features: extract_features(&epochs, windows),
            blocks,
        })
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn train_rows(&self, b: usize) -> Vec<usize> {
        let test = &self.blocks[b].rows;
        (0..self.features.n_rows()).filter(|i| !test.contains(i)).collect()
    }
}

/// Everything produced for one held-out block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutcome {
    pub block: u32,
    /// `(word, p(relevant))` per test epoch.
    pub predictions: Vec<(String, f64)>,
    pub query: Vec<WeightedTerm>,
    pub fallback: bool,
    pub ranked: RankedList,
    pub result: BlockResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockResult {
    pub block: u32,
    pub relevant_doc: String,
    pub irrelevant_doc: String,
    pub n_epochs: usize,
    pub n_relevant: usize,
    pub auc: Option<f64>,
    pub precision: Option<f64>,
    pub weighted_precision_rel: Option<f64>,
    pub weighted_precision_irr: Option<f64>,
    pub cg10: f64,
    pub cg20: f64,
    pub cg30: f64,
    pub p_class: Option<f64>,
    pub p_retrieval: Option<f64>,
}

struct Fold {
    probs: Vec<f64>,
    auc: Option<f64>,
}

fn fit_predict(prep: &Prepared, b: usize, train_labels: &[bool], params: &EvaluationParams) -> Result<Fold> {
    let train = prep.train_rows(b);
    let x = prep.features.data.select_rows(train.iter());
    let model = LdaModel::train_rows(&x, train_labels, params.shrinkage)?;
    let rows = prep.blocks[b].rows.clone();
    let test = prep.features.data.rows(rows.start, rows.len()).into_owned();
    let probs = model.predict_rows(&test)?;
    let truth: Vec<bool> = prep.features.labels[rows].iter().map(|l| l.is_relevant()).collect();
    let auc = match auc(&probs, &truth) {
        Ok(a) => Some(a),
        Err(Error::SingleClass) => None,
        Err(e) => return Err(e),
    };
    Ok(Fold { probs, auc })
}

fn retrieve(
    prep: &Prepared,
    b: usize,
    probs: &[f64],
    index: &TermDocumentMatrix,
    params: &EvaluationParams,
) -> Result<(Vec<(String, f64)>, Vec<WeightedTerm>, bool, RankedList)> {
    let rows = prep.blocks[b].rows.clone();
    let predictions: Vec<(String, f64)> = prep.features.words[rows].iter().cloned().zip(probs.iter().copied()).collect();
    let (feedback, fallback) = feedback_or_fallback(&predictions, index);
    let query = if feedback.is_empty() {
        log::warn!("block {}: no indexed words to learn an intent from", prep.blocks[b].id);
        Vec::new()
    } else {
        let model = linrel_score(&feedback, index, params.linrel)?;
        match select_query(&model, params.m_terms) {
            Ok(q) => q,
            Err(Error::NoPositiveWeights) => Vec::new(),
            Err(e) => return Err(e),
        }
    };
    let ranked = rank(&query, index, params.depth, params.mu)?;
    Ok((predictions, query, fallback, ranked))
}

fn judgments_for<'a>(judgments: &'a JudgmentSet, topic: &str, empty: &'a DocumentJudgments) -> &'a DocumentJudgments {
    judgments.get(topic).unwrap_or_else(|| {
        log::warn!("no judgments for topic {topic:?}; every document scores 0");
        empty
    })
}

fn true_training_labels(prep: &Prepared, b: usize) -> Vec<bool> {
    prep.train_rows(b).iter().map(|&i| prep.features.labels[i].is_relevant()).collect()
}

/// Train on every other block, predict block `b`, then run intent modeling
/// and retrieval on its predictions.
pub fn run_block(
    prep: &Prepared,
    b: usize,
    index: &TermDocumentMatrix,
    judgments: &JudgmentSet,
    params: &EvaluationParams,
) -> Result<BlockOutcome> {
    let fold = fit_predict(prep, b, &true_training_labels(prep, b), params)?;
    let (predictions, query, fallback, ranked) = retrieve(prep, b, &fold.probs, index, params)?;
    let block = &prep.blocks[b];
    let rows = block.rows.clone();
    let truth: Vec<bool> = prep.features.labels[rows.clone()].iter().map(|l| l.is_relevant()).collect();
    let predicted: Vec<bool> = fold.probs.iter().map(|&p| binarize(p) == Label::Relevant).collect();
    let tfidf = |doc: &str| -> Result<Vec<f64>> {
        prep.features.words[rows.clone()].iter().map(|w| index.tfidf_of_word(w, doc)).collect()
    };
    let empty = DocumentJudgments::default();
    let judged = judgments_for(judgments, &block.relevant_doc, &empty);
    let cg = CG_DEPTHS.map(|k| cumulative_gain(&ranked, judged, k));
    let result = BlockResult {
        block: block.id,
        relevant_doc: block.relevant_doc.clone(),
        irrelevant_doc: block.irrelevant_doc.clone(),
        n_epochs: truth.len(),
        n_relevant: truth.iter().filter(|&&t| t).count(),
        auc: fold.auc,
        precision: precision(&predicted, &truth),
        weighted_precision_rel: weighted_precision(&predicted, &truth, &tfidf(&block.relevant_doc)?),
        weighted_precision_irr: weighted_precision(&predicted, &truth, &tfidf(&block.irrelevant_doc)?),
        cg10: cg[0],
        cg20: cg[1],
        cg30: cg[2],
        p_class: None,
        p_retrieval: None,
    };
    Ok(BlockOutcome {
        block: block.id,
        predictions,
        query,
        fallback,
        ranked,
        result,
    })
}

/// One result per block, each block held out in turn.
pub fn leave_one_block_out(
    data: &ParticipantData,
    index: &TermDocumentMatrix,
    judgments: &JudgmentSet,
    params: &EvaluationParams,
) -> Result<Vec<BlockResult>> {
    let prep = Prepared::new(data, &params.windows)?;
    (0..prep.n_blocks())
        .map(|b| run_block(&prep, b, index, judgments, params).map(|o| o.result))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PermutationTest {
    pub observed: f64,
    pub null: Vec<f64>,
    pub p: f64,
}

impl PermutationTest {
    fn new(observed: f64, null: Vec<f64>) -> Self {
        let p = permutation_p_value(observed, &null);
        Self { observed, null, p }
    }
}

/// Training labels of fold `b`, shuffled with the stream of permutation `i`.
fn permuted_labels(prep: &Prepared, b: usize, seeds: &SeedTree, i: usize) -> Vec<bool> {
    let mut labels = true_training_labels(prep, b);
    labels.shuffle(&mut seeds.index(i as u64).index(b as u64).rng());
    labels
}

fn permutation_seeds(prep: &Prepared, params: &EvaluationParams) -> SeedTree {
    SeedTree::new(params.seed).child("permutation").child(&prep.participant)
}

/// Null distribution of held-out AUC on block `b` when the training labels
/// are shuffled. `None` when block `b` has a single class.
pub fn permutation_test_classification(
    prep: &Prepared,
    b: usize,
    params: &EvaluationParams,
) -> Result<Option<PermutationTest>> {
    let Some(observed) = fit_predict(prep, b, &true_training_labels(prep, b), params)?.auc else {
        return Ok(None);
    };
    let seeds = permutation_seeds(prep, params);
    let null = (0..params.permutations)
        .map(|i| Ok(fit_predict(prep, b, &permuted_labels(prep, b, &seeds, i), params)?.auc.unwrap_or(0.5)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(PermutationTest::new(observed, null)))
}

/// Null distribution of CG at the retrieval depth on block `b` when the
/// classifier feeding the intent model is trained on shuffled labels.
pub fn permutation_test_retrieval(
    prep: &Prepared,
    b: usize,
    index: &TermDocumentMatrix,
    judgments: &JudgmentSet,
    params: &EvaluationParams,
) -> Result<PermutationTest> {
    let empty = DocumentJudgments::default();
    let judged = judgments_for(judgments, &prep.blocks[b].relevant_doc, &empty);
    let gain = |labels: &[bool]| -> Result<f64> {
        let fold = fit_predict(prep, b, labels, params)?;
        let ranked = retrieve(prep, b, &fold.probs, index, params)?.3;
        Ok(cumulative_gain(&ranked, judged, params.depth))
    };
    let observed = gain(&true_training_labels(prep, b))?;
    let seeds = permutation_seeds(prep, params);
    let null = (0..params.permutations)
        .map(|i| gain(&permuted_labels(prep, b, &seeds, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(PermutationTest::new(observed, null))
}

/// Full protocol for one participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipantEvaluation {
    pub participant: String,
    pub blocks: Vec<BlockResult>,
    /// Mean held-out AUC over blocks against its permutation null.
    pub mean_auc: Option<PermutationTest>,
    /// Mean CG at the retrieval depth over blocks against its null.
    pub mean_cg: PermutationTest,
}

/// Leave-one-block-out evaluation with per-block and participant-level
/// permutation tests. Permutation `i` shuffles the training labels of
/// every fold with its own stream, so one pass yields the per-block nulls
/// and the null of the across-block means.
pub fn evaluate_participant(
    data: &ParticipantData,
    index: &TermDocumentMatrix,
    judgments: &JudgmentSet,
    params: &EvaluationParams,
) -> Result<ParticipantEvaluation> {
    let prep = Prepared::new(data, &params.windows)?;
    let n = prep.n_blocks();
    let empty = DocumentJudgments::default();
    let judged: Vec<&DocumentJudgments> =
        prep.blocks.iter().map(|blk| judgments_for(judgments, &blk.relevant_doc, &empty)).collect();
    let mut blocks = Vec::with_capacity(n);
    let mut observed_cg = Vec::with_capacity(n);
    for b in 0..n {
        let outcome = run_block(&prep, b, index, judgments, params)?;
        observed_cg.push(cumulative_gain(&outcome.ranked, judged[b], params.depth));
        blocks.push(outcome.result);
    }

    let seeds = permutation_seeds(&prep, params);
    let k = params.permutations;
    let mut null_auc = vec![Vec::with_capacity(k); n];
    let mut null_cg = vec![Vec::with_capacity(k); n];
    for i in 0..k {
        for b in 0..n {
            let fold = fit_predict(&prep, b, &permuted_labels(&prep, b, &seeds, i), params)?;
            let ranked = retrieve(&prep, b, &fold.probs, index, params)?.3;
            // A permuted fold keeps the test labels, so AUC is defined
            // exactly when the observed one is.
            null_auc[b].push(fold.auc.unwrap_or(0.5));
            null_cg[b].push(cumulative_gain(&ranked, judged[b], params.depth));
        }
    }

    for (b, r) in blocks.iter_mut().enumerate() {
        r.p_class = r.auc.map(|a| permutation_p_value(a, &null_auc[b]));
        r.p_retrieval = Some(permutation_p_value(observed_cg[b], &null_cg[b]));
    }

    let defined: Vec<usize> = (0..n).filter(|&b| blocks[b].auc.is_some()).collect();
    let mean_auc = (!defined.is_empty()).then(|| {
        let observed = mean(&defined.iter().map(|&b| blocks[b].auc.unwrap()).collect::<Vec<_>>());
        let null = (0..k).map(|i| mean(&defined.iter().map(|&b| null_auc[b][i]).collect::<Vec<_>>())).collect();
        PermutationTest::new(observed, null)
    });
    let null_mean_cg = (0..k).map(|i| mean(&(0..n).map(|b| null_cg[b][i]).collect::<Vec<_>>())).collect();
    Ok(ParticipantEvaluation {
        participant: data.id.clone(),
        blocks,
        mean_auc,
        mean_cg: PermutationTest::new(mean(&observed_cg), null_mean_cg),
    })
}

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub participant: String,
    #[serde(flatten)]
    pub result: BlockResult,
    pub config_hash: String,
    pub seed: u64,
}
