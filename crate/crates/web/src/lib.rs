//! Browser bindings. Every export takes and returns plain strings; structured
//! results are JSON documents.

use nereval::fixture;
use nereval::ingest::{parse_inline, write_inline, write_standoff, Diagnostic};
use nereval::metrics::{format_decimal, partial_metrics, precision, recall, Ratio};
use nereval::model::{Category, Document, Mention};
use nereval::perturb::{expected_counts, perturb, Edit, ErrorModel};
use nereval::{align, exact_counts, spatial_counts, typed_counts, ExactCounts, SpatialCounts, Tally};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const DOC_ID: &str = "demo";

#[derive(Serialize)]
struct MentionView {
    start: usize,
    end: usize,
    #[serde(rename = "type")]
    entity_type: String,
    surface: String,
}

impl From<&Mention> for MentionView {
    fn from(m: &Mention) -> Self {
        MentionView {
            start: m.span.start(),
            end: m.span.end(),
            entity_type: m.entity_type.to_string(),
            surface: m.surface.clone(),
        }
    }
}

#[derive(Serialize)]
struct Row {
    class: &'static str,
    reference: Option<MentionView>,
    estimate: Option<MentionView>,
    overlap: usize,
    type_agrees: Option<bool>,
}

#[derive(Serialize)]
struct Evaluation {
    text: String,
    rows: Vec<Row>,
    spatial: SpatialCounts,
    exact: ExactCounts,
    typed: Tally,
    /// Rendered measures, two decimals, "—" when undefined.
    measures: Vec<(&'static str, String)>,
}

fn render(r: Ratio) -> String {
    r.value()
        .map(|v| format_decimal(v, 2, false))
        .unwrap_or_else(|| nereval::report::UNDEFINED.to_string())
}

fn describe(diagnostics: &[Diagnostic]) -> String {
    diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

/// Scores hypothesis markup against gold markup. Both are inline-annotated
/// versions of the same text, e.g. `[Person Ada Lovelace] met [Person Babbage]`.
pub fn evaluate_json(gold_markup: &str, hyp_markup: &str) -> Result<String, String> {
    let gold = parse_inline(DOC_ID, "gold", gold_markup);
    if gold.has_errors() {
        return Err(format!("gold markup:\n{}", describe(&gold.diagnostics)));
    }
    let hyp = parse_inline(DOC_ID, "hypothesis", hyp_markup);
    if hyp.has_errors() {
        return Err(format!("hypothesis markup:\n{}", describe(&hyp.diagnostics)));
    }
    if gold.value.text != hyp.value.text {
        return Err("gold and hypothesis markup must annotate the same text".into());
    }
    let (refs, ests) = (&gold.value.annotations.mentions, &hyp.value.annotations.mentions);
    let a = align(refs, ests).map_err(|e| e.to_string())?;

    let mut rows: Vec<Row> = a
        .pairs
        .iter()
        .map(|p| Row {
            class: if p.exact { "FM" } else { "PM" },
            reference: Some((&refs[p.ref_index]).into()),
            estimate: Some((&ests[p.est_index]).into()),
            overlap: p.overlap_chars,
            type_agrees: Some(p.type_agrees),
        })
        .collect();
    rows.extend(a.unmatched_refs.iter().map(|&i| Row {
        class: "CM",
        reference: Some((&refs[i]).into()),
        estimate: None,
        overlap: 0,
        type_agrees: None,
    }));
    rows.extend(a.unmatched_ests.iter().map(|&j| Row {
        class: "WH",
        reference: None,
        estimate: Some((&ests[j]).into()),
        overlap: 0,
        type_agrees: None,
    }));
    let position = |r: &Row| {
        let m = r.reference.as_ref().or(r.estimate.as_ref()).expect("row has a side");
        (m.start, m.end)
    };
    rows.sort_by_key(position);

    let spatial = spatial_counts(&a);
    let typed = typed_counts(&a, refs, ests).overall;
    let m = partial_metrics(&spatial);
    let measures = vec![
        ("Full precision", render(m.pre_full)),
        ("Partial precision", render(m.pre_partial)),
        ("Full recall", render(m.rec_full)),
        ("Partial recall", render(m.rec_partial)),
        ("Total precision", render(m.pre_total)),
        ("Total recall", render(m.rec_total)),
        ("Typed precision", render(precision(typed.tp, typed.fp))),
        ("Typed recall", render(recall(typed.tp, typed.fn_))),
    ];
    let out = Evaluation {
        text: gold.value.text,
        rows,
        spatial,
        exact: exact_counts(&a),
        typed,
        measures,
    };
    Ok(serde_json::to_string(&out).expect("evaluation serializes"))
}

#[derive(Serialize)]
struct Perturbation {
    /// Inline markup of the hypothesis, absent when its mentions overlap and
    /// cannot be bracketed.
    markup: Option<String>,
    standoff: String,
    edits: Vec<Edit>,
    expected: SpatialCounts,
    warnings: Vec<String>,
}

/// Injects errors into gold markup according to an error-model JSON object.
pub fn perturb_json(gold_markup: &str, model_json: &str) -> Result<String, String> {
    let gold = parse_inline(DOC_ID, "gold", gold_markup);
    if gold.has_errors() {
        return Err(format!("gold markup:\n{}", describe(&gold.diagnostics)));
    }
    let model: ErrorModel = serde_json::from_str(model_json).map_err(|e| format!("error model: {e}"))?;
    let doc = Document {
        id: DOC_ID.to_string(),
        text: gold.value.text.clone(),
        category: Category::Others,
    };
    let p = perturb(&doc, &gold.value.annotations, &model, "hypothesis").map_err(|e| e.to_string())?;
    let out = Perturbation {
        markup: write_inline(&doc.text, &p.hypothesis.mentions),
        standoff: write_standoff(&p.hypothesis),
        expected: expected_counts(&p.ledger),
        edits: p.ledger.edits,
        warnings: p.diagnostics.iter().map(|d| d.to_string()).collect(),
    };
    Ok(serde_json::to_string(&out).expect("perturbation serializes"))
}

/// The bundled biography example as `{"gold": ..., "estimate": ...}` markup.
pub fn example_json() -> String {
    serde_json::json!({
        "gold": fixture::GOLD_MARKUP,
        "estimate": fixture::ESTIMATE_MARKUP,
    })
    .to_string()
}

#[wasm_bindgen]
pub fn evaluate(gold_markup: &str, hyp_markup: &str) -> Result<String, JsError> {
    evaluate_json(gold_markup, hyp_markup).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = perturb)]
pub fn perturb_markup(gold_markup: &str, model_json: &str) -> Result<String, JsError> {
    perturb_json(gold_markup, model_json).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn example() -> String {
    example_json()
}
