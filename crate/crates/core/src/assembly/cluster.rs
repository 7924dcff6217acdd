//! Column discovery inside multi-column regions: min-max scaling of x centers
//! followed by one-dimensional DBSCAN.

use serde::{Deserialize, Serialize};

use crate::model::{Entity, Group, GroupKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterParams {
    pub eps: f64,
    pub min_samples: usize,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            eps: 0.3,
            min_samples: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClusterLabel {
    Cluster(usize),
    Noise,
}

/// Maps each value to `(v - min) / (max - min)`; a zero range maps everything to 0.
pub fn minmax_scale(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    values
        .iter()
        .map(|v| if range > 0.0 { (v - min) / range } else { 0.0 })
        .collect()
}

/// DBSCAN over 1-D points. Neighborhoods include the point itself and use `<= eps`.
///
/// Points are visited in input order; each unassigned core point seeds the next
/// cluster id, and a border point joins the first cluster that reaches it.
pub fn dbscan(points: &[f64], params: &ClusterParams) -> Vec<ClusterLabel> {
    let n = points.len();
    let neighbors = |i: usize| -> Vec<usize> {
        (0..n)
            .filter(|&j| (points[i] - points[j]).abs() <= params.eps)
            .collect()
    };

    let mut labels: Vec<Option<ClusterLabel>> = vec![None; n];
    let mut next = 0;
    for i in 0..n {
        if labels[i].is_some() {
            continue;
        }
        let seeds = neighbors(i);
        if seeds.len() < params.min_samples {
            labels[i] = Some(ClusterLabel::Noise);
            continue;
        }
        let cluster = ClusterLabel::Cluster(next);
        next += 1;
        labels[i] = Some(cluster);
        let mut queue: std::collections::VecDeque<usize> = seeds.into_iter().collect();
        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Some(ClusterLabel::Noise) => labels[j] = Some(cluster),
                None => {
                    labels[j] = Some(cluster);
                    let nb = neighbors(j);
                    if nb.len() >= params.min_samples {
                        queue.extend(nb);
                    }
                }
                Some(ClusterLabel::Cluster(_)) => {}
            }
        }
    }
    labels
        .into_iter()
        .map(|l| l.unwrap_or(ClusterLabel::Noise))
        .collect()
}

fn top_to_bottom(a: &&Entity, b: &&Entity) -> std::cmp::Ordering {
    a.top()
        .total_cmp(&b.top())
        .then(a.left().total_cmp(&b.left()))
        .then_with(|| a.id.cmp(&b.id))
}

/// Splits the members of a multi-column region into column groups.
///
/// Columns come out left to right by mean x center; each column reads top to
/// bottom. Noise points become singleton groups.
pub fn cluster_multi_column(members: &[&Entity], params: &ClusterParams) -> Vec<Group> {
    if members.is_empty() {
        return Vec::new();
    }
    // Canonical order so that border assignment does not depend on input order.
    let mut members = members.to_vec();
    members.sort_by(|a, b| {
        a.x_center
            .total_cmp(&b.x_center)
            .then_with(|| top_to_bottom(a, b))
    });
    let xs: Vec<f64> = members.iter().map(|e| e.x_center).collect();
    let labels = dbscan(&minmax_scale(&xs), params);

    let mut clusters: Vec<Vec<&Entity>> = Vec::new();
    let mut index_of = std::collections::HashMap::new();
    for (entity, label) in members.iter().zip(&labels) {
        match label {
            ClusterLabel::Cluster(c) => {
                let slot = *index_of.entry(*c).or_insert_with(|| {
                    clusters.push(Vec::new());
                    clusters.len() - 1
                });
                clusters[slot].push(*entity);
            }
            ClusterLabel::Noise => clusters.push(vec![*entity]),
        }
    }

    let mean = |c: &[&Entity], f: fn(&Entity) -> f64| c.iter().map(|e| f(e)).sum::<f64>() / c.len() as f64;
    let mut keyed: Vec<(f64, f64, Vec<&Entity>)> = clusters
        .into_iter()
        .map(|mut c| {
            c.sort_by(top_to_bottom);
            (mean(&c, |e| e.x_center), mean(&c, |e| e.top()), c)
        })
        .collect();
    keyed.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then_with(|| a.2[0].id.cmp(&b.2[0].id))
    });
    keyed
        .into_iter()
        .map(|(_, _, c)| Group::from_members(GroupKind::MultiColumn, &c).expect("non-empty cluster"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BBox, ElementLabel, EntityValue, SchemaWeights};
    use ClusterLabel::*;

    fn ent(id: &str, l: f64, t: f64, r: f64, b: f64) -> Entity {
        Entity::new(
            id,
            ElementLabel::Text,
            0.9,
            EntityValue::text(id),
            BBox::new(l, t, r, b).unwrap(),
            &SchemaWeights::default(),
        )
        .unwrap()
    }

    #[test]
    fn minmax_examples() {
        assert_eq!(minmax_scale(&[0., 5., 10.]), [0.0, 0.5, 1.0]);
        assert_eq!(minmax_scale(&[7., 7., 7.]), [0.0, 0.0, 0.0]);
        assert_eq!(minmax_scale(&[3., 1., 2.]), [1.0, 0.0, 0.5]);
        assert!(minmax_scale(&[]).is_empty());
    }

    #[test]
    fn dbscan_examples() {
        let p = ClusterParams::default();
        assert!(dbscan(&[], &p).is_empty());
        assert_eq!(dbscan(&[0.0, 0.1, 0.9], &p), [Cluster(0), Cluster(0), Noise]);
        assert_eq!(dbscan(&[0.0, 0.25, 0.5], &p), [Cluster(0), Cluster(0), Cluster(0)]);
        assert_eq!(dbscan(&[0.9, 0.0, 1.0, 0.1], &p), [Cluster(0), Cluster(1), Cluster(0), Cluster(1)]);
    }

    #[test]
    fn border_point_joins_first_cluster() {
        // 0.5 is a border point of both the 0.25 and the 0.75 cores; it is seen
        // first (labelled noise), then claimed by the cluster seeded at index 1.
        let p = ClusterParams { eps: 0.3, min_samples: 4 };
        let pts = [0.5, 0.75, 0.9, 0.95, 1.0, 0.0, 0.05, 0.1, 0.25];
        let labels = dbscan(&pts, &p);
        assert_eq!(labels[0], Cluster(0));
        assert_eq!(labels[1], Cluster(0));
        assert_eq!(labels[5], Cluster(1));
        assert_eq!(labels[8], Cluster(1));
    }

    #[test]
    fn two_columns_left_first_top_to_bottom() {
        let es = [
            ent("r2", 450., 300., 550., 350.),
            ent("l1", 50., 100., 150., 150.),
            ent("r1", 450., 100., 550., 150.),
            ent("l2", 50., 300., 150., 350.),
        ];
        let refs: Vec<&Entity> = es.iter().collect();
        let groups = cluster_multi_column(&refs, &ClusterParams::default());
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].ids, ["l1", "l2"]);
        assert_eq!(groups[1].ids, ["r1", "r2"]);
        assert_eq!(groups[0].kind, GroupKind::MultiColumn);
        assert_eq!(groups[0].pixel_coordinates, BBox::new(50., 100., 150., 350.).unwrap());
    }

    #[test]
    fn singleton_and_same_column() {
        let one = ent("a", 0., 0., 10., 10.);
        let groups = cluster_multi_column(&[&one], &ClusterParams::default());
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].ids, ["a"]);

        let es = [ent("b", 0., 50., 10., 60.), ent("a", 0., 0., 10., 10.), ent("c", 0., 90., 10., 99.)];
        let refs: Vec<&Entity> = es.iter().collect();
        let groups = cluster_multi_column(&refs, &ClusterParams::default());
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].ids, ["a", "b", "c"]);
    }
}
