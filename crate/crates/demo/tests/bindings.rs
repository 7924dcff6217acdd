use layoutkit_demo::{assemble, table_scores};
use serde_json::Value;

const TWO_COLUMNS: &str = r#"{
  "page_number": 1,
  "element_detections": [
    {"id": "r1", "label": "text", "confidence": 0.9, "bbox": [320, 100, 580, 180], "text": "Right top"},
    {"id": "l1", "label": "text", "confidence": 0.9, "bbox": [20, 100, 280, 180], "text": "Left top"},
    {"id": "l2", "label": "text", "confidence": 0.9, "bbox": [20, 200, 280, 280], "text": "Left bottom"},
    {"id": "r2", "label": "text", "confidence": 0.9, "bbox": [320, 200, 580, 280], "text": "Right bottom"}
  ],
  "layout_detections": [{"label": "multi_column", "confidence": 0.9, "bbox": [10, 90, 590, 290]}]
}"#;

#[test]
fn assembles_columns_in_reading_order() {
    let out: Value = serde_json::from_str(&assemble(TWO_COLUMNS, 0.3, 50.0).unwrap()).unwrap();
    assert_eq!(out["order"], serde_json::json!(["l1", "l2", "r1", "r2"]));
    assert_eq!(out["markdown"], "Left top\n\nLeft bottom\n\nRight top\n\nRight bottom\n");
    assert_eq!(out["page"]["groups"][0]["type"], "multi-col");
}

#[test]
fn without_region_reads_row_by_row() {
    let page = TWO_COLUMNS.replace("\"multi_column\"", "\"group\"").replace("0.9, \"bbox\": [10", "0.1, \"bbox\": [10");
    let out: Value = serde_json::from_str(&assemble(&page, 0.3, 50.0).unwrap()).unwrap();
    assert_eq!(out["order"], serde_json::json!(["l1", "r1", "l2", "r2"]));
}

#[test]
fn reports_bad_input() {
    assert!(assemble("{", 0.3, 50.0).is_err());
    assert!(assemble(r#"{"page_number": 1, "element_detections": [{"label": "poem", "confidence": 0.9, "bbox": [0,0,1,1]}]}"#, 0.3, 50.0)
        .unwrap_err()
        .contains("poem"));
}

#[test]
fn scores_tables() {
    let a = "<table><tr><td>1</td><td>2</td></tr></table>";
    let b = "<table><tr><td>1</td><td>3</td></tr></table>";
    let s = table_scores(a, a).unwrap();
    assert_eq!((s.teds, s.teds_s), (1.0, 1.0));
    let s = table_scores(a, b).unwrap();
    assert!(s.teds < 1.0);
    assert_eq!(s.teds_s, 1.0);
    assert!(table_scores(a, "<p>no table</p>").is_err());
    assert_eq!(layoutkit_demo::nid_score("abc", "abc"), 1.0);
}
