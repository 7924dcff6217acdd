//! Geometry, labels, schema weights and the document data model.
//!
//! All coordinates are pixels with the origin at the top-left corner of the
//! page and `y` growing downwards.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box in pixel space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct BBox {
    pub left: f64,
    pub top: f64,
    pub right: f64,
    pub bottom: f64,
}

#[derive(Deserialize)]
struct RawBox {
    left: f64,
    top: f64,
    right: f64,
    bottom: f64,
}

impl TryFrom<RawBox> for BBox {
    type Error = Error;

    fn try_from(raw: RawBox) -> Result<Self> {
        BBox::new(raw.left, raw.top, raw.right, raw.bottom)
    }
}

impl BBox {
    pub fn new(left: f64, top: f64, right: f64, bottom: f64) -> Result<Self> {
        let coords = [left, top, right, bottom];
        if coords.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidBox(format!(
                "coordinates must be finite and non-negative: {coords:?}"
            )));
        }
        if left > right || top > bottom {
            return Err(Error::InvalidBox(format!(
                "expected left <= right and top <= bottom: {coords:?}"
            )));
        }
        Ok(Self {
            left,
            top,
            right,
            bottom,
        })
    }

    /// Builds a box from a `[left, top, right, bottom]` array.
    pub fn from_ltrb(ltrb: [f64; 4]) -> Result<Self> {
        Self::new(ltrb[0], ltrb[1], ltrb[2], ltrb[3])
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn midpoint(&self) -> Point {
        midpoint(self)
    }

    /// Intersection-over-union. Two zero-area boxes have IoU 0.
    pub fn iou(&self, other: &BBox) -> f64 {
        let ix = (self.right.min(other.right) - self.left.max(other.left)).max(0.0);
        let iy = (self.bottom.min(other.bottom) - self.top.max(other.top)).max(0.0);
        let inter = ix * iy;
        let union = self.area() + other.area() - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub fn midpoint(b: &BBox) -> Point {
    Point {
        x: (b.left + b.right) / 2.0,
        y: (b.top + b.bottom) / 2.0,
    }
}

/// True when the midpoint of `element` lies inside `container`, edges included.
pub fn contains_midpoint(container: &BBox, element: &BBox) -> bool {
    let m = midpoint(element);
    container.left <= m.x && m.x <= container.right && container.top <= m.y && m.y <= container.bottom
}

pub fn union_bbox<'a, I>(boxes: I) -> Result<BBox>
where
    I: IntoIterator<Item = &'a BBox>,
{
    boxes
        .into_iter()
        .copied()
        .reduce(|acc, b| BBox {
            left: acc.left.min(b.left),
            top: acc.top.min(b.top),
            right: acc.right.max(b.right),
            bottom: acc.bottom.max(b.bottom),
        })
        .ok_or(Error::EmptyBoxSet)
}

macro_rules! closed_label {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(Error::UnknownLabel(other.to_string())),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

closed_label!(
    /// Semantic element classes produced by the element detector.
    ElementLabel {
        Title => "title",
        Header => "header",
        Section => "section",
        PageHeader => "page_header",
        PageFooter => "page_footer",
        Text => "text",
        ListItem => "list_item",
        TableOfContent => "table_of_content",
        Table => "table",
        Image => "image",
        TableCaption => "table_caption",
        ImageCaption => "image_caption",
    }
);

closed_label!(
    /// Structural regions produced by the layout detector.
    LayoutLabel {
        LayoutBox => "layout_box",
        ColumnGroup => "column_group",
        ColumnText => "column_text",
        Group => "group",
        MultiColumn => "multi_column",
        RowGroup => "row_group",
    }
);

impl ElementLabel {
    /// Labels whose text goes through the title normalizer.
    pub fn is_heading(&self) -> bool {
        matches!(self, Self::Title | Self::Section | Self::Header)
    }

    /// Tables and images survive without text.
    pub fn is_visual(&self) -> bool {
        matches!(self, Self::Table | Self::Image)
    }

    pub fn is_page_furniture(&self) -> bool {
        matches!(self, Self::PageHeader | Self::PageFooter)
    }
}

/// Per-label integer weights encoding hierarchy depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SchemaWeights(BTreeMap<ElementLabel, u32>);

impl Default for SchemaWeights {
    fn default() -> Self {
        use ElementLabel::*;
        Self(BTreeMap::from([
            (Title, 1),
            (Header, 2),
            (Section, 2),
            (PageHeader, 5),
            (PageFooter, 7),
            (Text, 6),
            (ListItem, 6),
            (TableOfContent, 4),
            (Table, 3),
            (Image, 3),
            (TableCaption, 4),
            (ImageCaption, 4),
        ]))
    }
}

impl<'de> Deserialize<'de> for SchemaWeights {
    /// Accepts a partial map; missing labels fall back to the defaults.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let overrides = BTreeMap::<ElementLabel, u32>::deserialize(d)?;
        SchemaWeights::default()
            .with_overrides(overrides)
            .map_err(serde::de::Error::custom)
    }
}

impl SchemaWeights {
    pub fn with_overrides(mut self, overrides: BTreeMap<ElementLabel, u32>) -> Result<Self> {
        for (label, w) in overrides {
            if w == 0 {
                return Err(Error::Validation(format!("weight for {label} must be positive")));
            }
            self.0.insert(label, w);
        }
        Ok(self)
    }

    pub fn weight(&self, label: ElementLabel) -> u32 {
        // Totality is guaranteed by construction from `default()`.
        self.0[&label]
    }
}

pub fn weight_of(label: ElementLabel, schema: &SchemaWeights) -> u32 {
    schema.weight(label)
}

/// A record-style table row: ordered field name to cell string.
pub type Row = IndexMap<String, String>;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntityValue {
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<Row>>,
}

impl EntityValue {
    pub fn text(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            ..Default::default()
        }
    }

    /// Best available textual content: OCR text, then summary, then title.
    pub fn content(&self) -> &str {
        if !self.text.trim().is_empty() {
            &self.text
        } else if let Some(s) = self.summary.as_deref().filter(|s| !s.trim().is_empty()) {
            s
        } else {
            self.title.as_deref().unwrap_or("")
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_rows(self.data.as_deref().unwrap_or(&[]))
    }
}

/// Rows must share one ordered key set.
pub fn validate_rows(rows: &[Row]) -> Result<()> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    for (i, row) in rows.iter().enumerate().skip(1) {
        if !row.keys().eq(first.keys()) {
            return Err(Error::Validation(format!(
                "table row {i} has keys {:?}, expected {:?}",
                row.keys().collect::<Vec<_>>(),
                first.keys().collect::<Vec<_>>()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: String,
    #[serde(rename = "type")]
    pub label: ElementLabel,
    pub confidence: f64,
    pub value: EntityValue,
    pub pixel_coordinates: BBox,
    pub mid_point: Point,
    pub x_center: f64,
    pub y_center: f64,
    pub weight: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_payload: Option<String>,
}

impl Entity {
    pub fn new(
        id: impl Into<String>,
        label: ElementLabel,
        confidence: f64,
        value: EntityValue,
        bbox: BBox,
        schema: &SchemaWeights,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(Error::Validation(format!(
                "confidence {confidence} outside [0, 1]"
            )));
        }
        let mid = midpoint(&bbox);
        Ok(Self {
            id: id.into(),
            label,
            confidence,
            value,
            pixel_coordinates: bbox,
            mid_point: mid,
            x_center: mid.x,
            y_center: mid.y,
            weight: schema.weight(label),
            image_payload: None,
        })
    }

    pub fn bbox(&self) -> &BBox {
        &self.pixel_coordinates
    }

    pub fn top(&self) -> f64 {
        self.pixel_coordinates.top
    }

    pub fn left(&self) -> f64 {
        self.pixel_coordinates.left
    }

    pub fn text(&self) -> &str {
        &self.value.text
    }

    /// Changes the label and recomputes the weight.
    pub fn relabel(&mut self, label: ElementLabel, schema: &SchemaWeights) {
        self.label = label;
        self.weight = schema.weight(label);
    }

    /// Checks that derived fields agree with geometry and schema.
    pub fn validate(&self, schema: &SchemaWeights) -> Result<()> {
        let mid = midpoint(&self.pixel_coordinates);
        if self.mid_point != mid || self.x_center != mid.x || self.y_center != mid.y {
            return Err(Error::Validation(format!(
                "entity {} has inconsistent mid_point/centers",
                self.id
            )));
        }
        if self.weight != schema.weight(self.label) {
            return Err(Error::Validation(format!(
                "entity {} has weight {} but schema says {}",
                self.id,
                self.weight,
                schema.weight(self.label)
            )));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(Error::Validation(format!(
                "entity {} has confidence {} outside [0, 1]",
                self.id, self.confidence
            )));
        }
        self.value.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "multi-col")]
    MultiColumn,
    #[serde(rename = "row")]
    Row,
    #[serde(rename = "group")]
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    #[serde(rename = "type")]
    pub kind: GroupKind,
    pub ids: Vec<String>,
    pub pixel_coordinates: BBox,
    pub mid_point: Point,
    pub x_center: f64,
    pub y_center: f64,
}

impl Group {
    /// Builds a group over `members`, keeping their order.
    pub fn from_members(kind: GroupKind, members: &[&Entity]) -> Result<Self> {
        let bbox = union_bbox(members.iter().map(|e| e.bbox()))?;
        let mid = midpoint(&bbox);
        Ok(Self {
            kind,
            ids: members.iter().map(|e| e.id.clone()).collect(),
            pixel_coordinates: bbox,
            mid_point: mid,
            x_center: mid.x,
            y_center: mid.y,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageResult {
    pub page_number: u32,
    /// Insertion order is reading order.
    pub elements: IndexMap<String, Entity>,
    pub groups: Vec<Group>,
    pub non_groups: Vec<String>,
    pub skipped_images: Vec<String>,
    /// Page height in pixels when the input supplied it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page_height: Option<f64>,
}

impl PageResult {
    pub fn empty(page_number: u32) -> Self {
        Self {
            page_number,
            elements: IndexMap::new(),
            groups: Vec::new(),
            non_groups: Vec::new(),
            skipped_images: Vec::new(),
            page_height: None,
        }
    }

    /// Supplied height, else the largest bottom coordinate on the page.
    pub fn effective_height(&self) -> f64 {
        self.page_height.unwrap_or_else(|| {
            self.elements
                .values()
                .map(|e| e.pixel_coordinates.bottom)
                .fold(0.0, f64::max)
        })
    }

    pub fn validate(&self, schema: &SchemaWeights) -> Result<()> {
        let ctx = |msg: String| Error::Validation(format!("page {}: {msg}", self.page_number));
        if self.page_number == 0 {
            return Err(ctx("page_number must be positive".into()));
        }
        for (key, entity) in &self.elements {
            if key != &entity.id {
                return Err(ctx(format!("element key {key} does not match id {}", entity.id)));
            }
            entity.validate(schema).map_err(|e| ctx(e.to_string()))?;
        }
        let mut seen = std::collections::HashSet::new();
        for group in &self.groups {
            if group.ids.is_empty() {
                return Err(ctx("group with no ids".into()));
            }
            let members: Vec<&Entity> = group
                .ids
                .iter()
                .map(|id| {
                    self.elements
                        .get(id)
                        .ok_or_else(|| ctx(format!("group references unknown id {id}")))
                })
                .collect::<Result<_>>()?;
            if union_bbox(members.iter().map(|e| e.bbox()))? != group.pixel_coordinates {
                return Err(ctx("group bbox is not the union of its members".into()));
            }
        }
        let grouped = self.groups.iter().flat_map(|g| g.ids.iter());
        for id in grouped.chain(self.non_groups.iter()) {
            if !self.elements.contains_key(id) {
                return Err(ctx(format!("unknown id {id}")));
            }
            if !seen.insert(id) {
                return Err(ctx(format!("id {id} appears more than once in groups/non_groups")));
            }
        }
        if seen.len() != self.elements.len() {
            return Err(ctx("groups and non_groups do not cover every element".into()));
        }
        if let Some(id) = self.skipped_images.iter().find(|id| self.elements.contains_key(*id)) {
            return Err(ctx(format!("skipped image {id} is also an element")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentResult {
    pub filename: String,
    pub total_pages: usize,
    pub total_processed_pages: usize,
    pub total_failed_pages: usize,
    pub total_llm_calls: usize,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub document_category: String,
    pub pages: Vec<PageResult>,
}

impl DocumentResult {
    pub fn validate(&self, schema: &SchemaWeights) -> Result<()> {
        if self.total_processed_pages + self.total_failed_pages != self.total_pages {
            return Err(Error::Validation(format!(
                "processed ({}) + failed ({}) != total ({})",
                self.total_processed_pages, self.total_failed_pages, self.total_pages
            )));
        }
        if self.pages.windows(2).any(|w| w[0].page_number >= w[1].page_number) {
            return Err(Error::Validation(
                "pages must be sorted by unique ascending page_number".into(),
            ));
        }
        self.pages.iter().try_for_each(|p| p.validate(schema))
    }

    /// Iterates `(page_number, entity)` in document reading order.
    pub fn entities(&self) -> impl Iterator<Item = (u32, &Entity)> {
        self.pages
            .iter()
            .flat_map(|p| p.elements.values().map(move |e| (p.page_number, e)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bb(l: f64, t: f64, r: f64, b: f64) -> BBox {
        BBox::new(l, t, r, b).unwrap()
    }

    #[test]
    fn midpoint_examples() {
        assert_eq!(midpoint(&bb(0., 0., 10., 10.)), Point { x: 5., y: 5. });
        assert_eq!(midpoint(&bb(0., 0., 0., 0.)), Point { x: 0., y: 0. });
        assert_eq!(midpoint(&bb(2., 4., 8., 10.)), Point { x: 5., y: 7. });
    }

    #[test]
    fn containment_examples() {
        let c = bb(0., 0., 100., 100.);
        assert!(contains_midpoint(&c, &bb(40., 40., 60., 60.)));
        assert!(!contains_midpoint(&c, &bb(90., 90., 120., 120.)));
        assert!(contains_midpoint(&c, &bb(100., 100., 100., 100.)));
    }

    #[test]
    fn union_examples() {
        assert_eq!(union_bbox(&[bb(0., 0., 1., 1.)]).unwrap(), bb(0., 0., 1., 1.));
        assert_eq!(
            union_bbox(&[bb(0., 0., 1., 1.), bb(2., 2., 3., 3.)]).unwrap(),
            bb(0., 0., 3., 3.)
        );
        assert_eq!(
            union_bbox(&[bb(5., 1., 6., 9.), bb(0., 3., 2., 4.)]).unwrap(),
            bb(0., 1., 6., 9.)
        );
        let err = union_bbox(&[]).unwrap_err();
        assert_eq!(err.to_string(), "empty box set");
    }

    #[test]
    fn default_weights() {
        let s = SchemaWeights::default();
        assert_eq!(weight_of(ElementLabel::Title, &s), 1);
        assert_eq!(weight_of(ElementLabel::Section, &s), 2);
        assert_eq!(weight_of(ElementLabel::Table, &s), 3);
        assert_eq!(weight_of(ElementLabel::Text, &s), 6);
        assert_eq!(weight_of(ElementLabel::PageFooter, &s), 7);
        for l in ElementLabel::ALL {
            assert!(s.weight(*l) > 0);
        }
    }

    #[test]
    fn weights_partial_override() {
        let s: SchemaWeights = serde_json::from_str(r#"{"image": 9}"#).unwrap();
        assert_eq!(s.weight(ElementLabel::Image), 9);
        assert_eq!(s.weight(ElementLabel::Title), 1);
        assert!(serde_json::from_str::<SchemaWeights>(r#"{"image": 0}"#).is_err());
        assert!(serde_json::from_str::<SchemaWeights>(r#"{"figure": 2}"#).is_err());
    }

    #[test]
    fn invalid_boxes_rejected() {
        assert!(BBox::new(5., 0., 1., 1.).is_err());
        assert!(BBox::new(0., 0., f64::NAN, 1.).is_err());
        assert!(BBox::new(-1., 0., 1., 1.).is_err());
        assert!(serde_json::from_str::<BBox>(r#"{"left":3,"top":0,"right":1,"bottom":1}"#).is_err());
    }

    #[test]
    fn labels_round_trip_and_reject_unknown() {
        for l in ElementLabel::ALL {
            assert_eq!(l.as_str().parse::<ElementLabel>().unwrap(), *l);
        }
        let err = "figure".parse::<ElementLabel>().unwrap_err();
        assert!(err.to_string().contains("figure"));
        assert!("row_group".parse::<LayoutLabel>().is_ok());
    }

    #[test]
    fn entity_derived_fields_survive_serialization() {
        let s = SchemaWeights::default();
        let e = Entity::new("a", ElementLabel::Text, 0.9, EntityValue::text("x"), bb(0., 0., 10., 10.), &s)
            .unwrap();
        assert_eq!(e.mid_point, Point { x: 5., y: 5. });
        assert_eq!(e.weight, 6);
        let back: Entity = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        back.validate(&s).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn rows_must_share_keys() {
        let mut a = Row::new();
        a.insert("A".into(), "1".into());
        let mut b = Row::new();
        b.insert("B".into(), "2".into());
        assert!(validate_rows(&[a.clone(), a.clone()]).is_ok());
        assert!(validate_rows(&[a, b]).is_err());
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0.0..500.0f64, 0.0..500.0f64, 0.0..300.0f64, 0.0..300.0f64)
            .prop_map(|(l, t, w, h)| BBox::new(l, t, l + w, t + h).unwrap())
    }

    proptest! {
        #[test]
        fn box_contains_own_midpoint(b in arb_box()) {
            prop_assert!(contains_midpoint(&b, &b));
        }

        #[test]
        fn union_idempotent_and_order_insensitive(boxes in prop::collection::vec(arb_box(), 1..8)) {
            let u = union_bbox(&boxes).unwrap();
            prop_assert_eq!(union_bbox(&[u, u]).unwrap(), u);
            let mut rev = boxes.clone();
            rev.reverse();
            prop_assert_eq!(union_bbox(&rev).unwrap(), u);
        }
    }
}
