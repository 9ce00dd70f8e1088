use funnel_core::graph::{EdgeKind, MultimodalGraph, NodeKey, NodeKind};
use funnel_core::metrics::layout::{run_layout, seeded_positions, LayoutParams};
use funnel_core::metrics::DiTopology;
use funnel_core::text::{clean_text, extract_mentions, is_valid_handle};
use funnel_core::{filter_by_degree, merge_graphs, topic_match, CleanTweet, FilterSpec, RawTweet, Topic};
use proptest::prelude::*;

fn handle() -> impl Strategy<Value = String> {
    "[A-Za-z0-9_]{1,15}"
}

/// Tweet text built from words, mentions and noise.
fn tweet_text() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "[a-z]{1,6}",
        handle().prop_map(|h| format!("@{h}")),
        Just("RT".to_string()),
        Just("&amp;".to_string()),
        "[ \t\r\n<>&'\"@#.,é]{1,3}",
    ];
    prop::collection::vec(piece, 0..10).prop_map(|p| p.join(" "))
}

fn tweet(id: usize, author: &str, text: &str, at: i64) -> CleanTweet {
    CleanTweet::from_raw(RawTweet::new(id.to_string(), author, text, at))
}

fn corpus() -> impl Strategy<Value = Vec<CleanTweet>> {
    let authors = ["alice", "Bob", "bob", "carol", "dave", "erin"];
    prop::collection::vec((0..authors.len(), tweet_text(), 0i64..1000), 0..25).prop_map(move |rows| {
        rows.into_iter().enumerate().map(|(i, (a, text, at))| tweet(i, authors[a], &text, at)).collect()
    })
}

fn build(tweets: &[CleanTweet]) -> MultimodalGraph {
    let mut g = MultimodalGraph::new();
    for t in tweets {
        g.add_tweet(t).unwrap();
    }
    g
}

proptest! {
    #[test]
    fn clean_text_is_idempotent(s in any::<String>()) {
        let once = clean_text(&s);
        prop_assert_eq!(clean_text(&once), once);
    }

    #[test]
    fn clean_text_leaves_no_raw_metacharacters(s in "[ -~\t\r\n\u{1}é“”]{0,40}") {
        let out = clean_text(&s);
        prop_assert!(!out.contains(['\r', '\n', '\t', '<', '>', '"', '\'']));
        prop_assert!(!out.contains("  "));
        prop_assert_eq!(out.trim(), out.as_str());
        for (i, _) in out.match_indices('&') {
            let rest = &out[i..];
            prop_assert!(["&amp;", "&lt;", "&gt;", "&quot;", "&apos;"].iter().any(|e| rest.starts_with(e)));
        }
    }

    #[test]
    fn mentions_are_valid_distinct_and_exclude_author(text in tweet_text(), author in handle()) {
        let found = extract_mentions(&text, &author);
        let mut folded: Vec<String> = found.iter().map(|h| h.to_ascii_lowercase()).collect();
        prop_assert!(found.iter().all(|h| is_valid_handle(h)));
        prop_assert!(!folded.contains(&author.to_ascii_lowercase()));
        let before = folded.len();
        folded.sort();
        folded.dedup();
        prop_assert_eq!(before, folded.len());
    }

    #[test]
    fn topic_match_ignores_case(text in "[A-Za-z0-9# ]{0,30}", kw in "[A-Za-z0-9]{1,5}", flips in any::<u64>()) {
        let flip = |s: &str, salt: u64| -> String {
            s.chars().enumerate().map(|(i, c)| {
                if (flips.rotate_left((i as u32 + salt as u32) % 64)) & 1 == 1 { c.to_ascii_uppercase() } else { c.to_ascii_lowercase() }
            }).collect()
        };
        let a = topic_match(&RawTweet::new("1", "u", text.clone(), 0), &Topic::new("t", [kw.clone()]).unwrap()).unwrap();
        let b = topic_match(&RawTweet::new("1", "u", flip(&text, 1), 0), &Topic::new("t", [flip(&kw, 7)]).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn node_and_edge_count_law(author in handle(), mentions in prop::collection::vec(handle(), 0..8)) {
        let text = mentions.iter().map(|m| format!("@{m}")).collect::<Vec<_>>().join(" ");
        let t = tweet(1, &author, &text, 0);
        let k = t.mentions.len();
        let g = build(std::slice::from_ref(&t));
        prop_assert_eq!(g.node_count(), k + 2);
        prop_assert_eq!(g.edge_count(), 2 * k + 1);
    }

    #[test]
    fn mention_order_does_not_matter(author in handle(), mentions in prop::collection::vec(handle(), 0..8)) {
        let text = mentions.iter().map(|m| format!("@{m}")).collect::<Vec<_>>().join(" ");
        let reversed = mentions.iter().rev().map(|m| format!("@{m}")).collect::<Vec<_>>().join(" ");
        let mut a = tweet(1, &author, &text, 0);
        let b = tweet(1, &author, &reversed, 0);
        // Same tweet, only the order of its mentions differs.
        a.tweet.text = b.tweet.text.clone();
        prop_assert_eq!(build(&[a]), build(&[b]));
    }

    #[test]
    fn tweet_nodes_have_one_author_and_degrees_add_up(tweets in corpus()) {
        let g = build(&tweets);
        for (key, node) in g.nodes() {
            let authored_in = g.edges().filter(|(e, _)| &e.target == key && e.kind == EdgeKind::Authored).count();
            if key.kind == NodeKind::Tweet {
                prop_assert_eq!(authored_in, 1);
            } else {
                let authored = g.edges().filter(|(e, _)| &e.source == key && e.kind == EdgeKind::Authored).count();
                let mentioned = g.edges().filter(|(e, _)| &e.source == key && e.kind == EdgeKind::Mentions).count();
                prop_assert_eq!(node.out_degree(), authored + mentioned);
            }
            prop_assert_eq!(node.in_degree(), g.edges().filter(|(e, _)| &e.target == key).count());
        }
        prop_assert!(g.edges().all(|(e, d)| d.weight >= 1 && e.source != e.target));
    }

    #[test]
    fn merge_is_associative_and_commutative(tweets in corpus(), cut1 in 0usize..25, cut2 in 0usize..25) {
        let (c1, c2) = (cut1.min(tweets.len()), cut2.min(tweets.len()));
        let (lo, hi) = (c1.min(c2), c1.max(c2));
        let a = build(&tweets[..lo]);
        let b = build(&tweets[lo..hi]);
        let c = build(&tweets[hi..]);
        prop_assert_eq!(merge_graphs(&a, &b), merge_graphs(&b, &a));
        prop_assert_eq!(merge_graphs(&merge_graphs(&a, &b), &c), merge_graphs(&a, &merge_graphs(&b, &c)));
        prop_assert_eq!(merge_graphs(&merge_graphs(&a, &b), &c), build(&tweets));
    }

    #[test]
    fn filter_keeps_hubs_and_subsets(tweets in corpus(), n in prop::sample::select(vec![0usize, 1, 2, 5]), drop_rt in any::<bool>()) {
        let g = build(&tweets);
        let spec = FilterSpec { min_degree: n, drop_retweets: drop_rt, drop_isolated_after: false };
        let out = filter_by_degree(&g, &spec);
        for (key, node) in out.nodes() {
            prop_assert_eq!(g.node(key).map(|n| &n.label), Some(&node.label));
        }
        for (key, data) in out.edges() {
            prop_assert_eq!(g.edge(&key.source, &key.target, key.kind), Some(data));
        }
        if !drop_rt {
            for (key, node) in g.nodes() {
                if node.in_degree() > n || node.out_degree() > n {
                    prop_assert!(out.contains_node(key));
                }
            }
        }
        let again = filter_by_degree(&out, &spec);
        prop_assert!(again.nodes().all(|(k, _)| out.contains_node(k)));
    }
}

#[test]
fn zero_threshold_with_isolated_pass_is_idempotent() {
    let tweets: Vec<CleanTweet> = (0..30).map(|i| tweet(i, ["a", "b", "c"][i % 3], "@d @e", i as i64)).collect();
    let spec = FilterSpec { min_degree: 0, drop_retweets: false, drop_isolated_after: true };
    let once = filter_by_degree(&build(&tweets), &spec);
    assert_eq!(filter_by_degree(&once, &spec), once);
}

#[test]
fn bridged_cliques_separate_in_layout() {
    // Two 5-cliques joined by the single edge 4 -> 5.
    let mut edges = Vec::new();
    for base in [0usize, 5] {
        for u in base..base + 5 {
            for v in u + 1..base + 5 {
                edges.push((u, v));
            }
        }
    }
    edges.push((4, 5));
    let topo = DiTopology::from_edges(10, edges);
    for seed in 0..5 {
        let (pos, _) = run_layout(&topo, seeded_positions(10, seed, 100.0), 500, &LayoutParams::default());
        assert!(pos.iter().all(|p| p.x.is_finite() && p.y.is_finite()));
        let (mut intra, mut inter) = (Vec::new(), Vec::new());
        for u in 0..10 {
            for v in u + 1..10 {
                let d = pos[u].distance(pos[v]);
                if (u < 5) == (v < 5) { intra.push(d) } else { inter.push(d) }
            }
        }
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        assert!(mean(&inter) > mean(&intra), "seed {seed}: inter {} intra {}", mean(&inter), mean(&intra));
    }
}

#[test]
fn user_identity_is_case_folded() {
    let g = build(&[tweet(1, "UserA", "@UserB", 0), tweet(2, "userb", "@USERA", 1)]);
    assert_eq!(g.node_count(), 4);
    assert!(g.contains_node(&NodeKey::user("USERB")));
}
