//! Crawler behaviour against a real local HTTP server: traversal order,
//! limits, failure handling, and the fetch cache.

mod common;

use std::collections::BTreeMap;

use common::{Route, TestServer};
use docforge::corpus::{crawl, crawl_with_cache, CrawlConfig};
use docforge::Error;

/// A config pointed at `seed` with the politeness delay turned off —
/// these tests talk to localhost.
fn quick_config(seed: &str) -> CrawlConfig {
    let mut config = CrawlConfig::new(seed);
    config.delay_ms = 0;
    config
}

fn routes(pairs: &[(&str, Route)]) -> BTreeMap<String, Route> {
    pairs
        .iter()
        .map(|(path, route)| {
            (
                path.to_string(),
                Route {
                    status: route.status,
                    content_type: route.content_type,
                    body: route.body.clone(),
                },
            )
        })
        .collect()
}

#[test]
fn breadth_first_order_on_the_seed_host_only() {
    let server = TestServer::start(routes(&[
        (
            "/",
            Route::html(
                r##"<p>Guide</p>
                <a href="/b">b</a>
                <a href="/c">c</a>
                <a href="http://elsewhere.test/x">external</a>"##,
            ),
        ),
        ("/b", Route::html(r##"<a href="/d">d</a>"##)),
        ("/c", Route::html("<p>leaf c</p>")),
        ("/d", Route::html("<p>leaf d</p>")),
    ]));
    let pages = crawl(&quick_config(&server.url("/"))).expect("crawl succeeds");

    let urls: Vec<&str> = pages.iter().map(|p| p.url.as_str()).collect();
    assert_eq!(
        urls,
        vec![
            server.url("/"),
            server.url("/b"),
            server.url("/c"),
            server.url("/d"),
        ]
    );
    let orders: Vec<usize> = pages.iter().map(|p| p.fetch_order).collect();
    assert_eq!(orders, vec![0, 1, 2, 3]);
    // The external host was never contacted (it would fail DNS anyway).
    assert_eq!(server.hit_paths(), vec!["/", "/b", "/c", "/d"]);
}

#[test]
fn page_cap_stops_before_fetching_more() {
    let server = TestServer::start(routes(&[
        ("/", Route::html(r##"<a href="/b">b</a><a href="/c">c</a>"##)),
        ("/b", Route::html("<p>b</p>")),
        ("/c", Route::html("<p>c</p>")),
    ]));
    let mut config = quick_config(&server.url("/"));
    config.max_pages = 2;
    let pages = crawl(&config).expect("crawl succeeds");
    assert_eq!(pages.len(), 2);
    assert_eq!(pages[1].url, server.url("/b"));
    // The cap prevents the fetch itself, not just the page record.
    assert_eq!(server.hit_paths(), vec!["/", "/b"]);
}

#[test]
fn failing_seed_is_fatal() {
    let server = TestServer::start(routes(&[("/other", Route::html("<p>not the seed</p>"))]));
    let err = crawl(&quick_config(&server.url("/"))).expect_err("seed 404 must fail");
    assert!(matches!(err, Error::Crawl(_)), "got {err:?}");
    let message = err.to_string();
    assert!(message.contains("seed"), "message was {message:?}");
    assert!(message.contains("404"), "message was {message:?}");
}

#[test]
fn failing_subpage_is_skipped_with_the_rest_kept() {
    let server = TestServer::start(routes(&[
        (
            "/",
            Route::html(r##"<a href="/broken">broken</a><a href="/ok">ok</a>"##),
        ),
        ("/broken", Route::status(500)),
        ("/ok", Route::html("<p>fine</p>")),
    ]));
    let pages = crawl(&quick_config(&server.url("/"))).expect("crawl succeeds");
    let urls: Vec<&str> = pages.iter().map(|p| p.url.as_str()).collect();
    assert_eq!(urls, vec![server.url("/"), server.url("/ok")]);
}

#[test]
fn non_html_responses_are_fetched_but_not_kept() {
    let server = TestServer::start(routes(&[
        (
            "/",
            Route::html(r##"<a href="/feed.json">data</a><a href="/next">next</a>"##),
        ),
        ("/feed.json", Route::typed("application/json", r#"{"ok":true}"#)),
        ("/next", Route::html("<p>next</p>")),
    ]));
    let pages = crawl(&quick_config(&server.url("/"))).expect("crawl succeeds");
    let urls: Vec<&str> = pages.iter().map(|p| p.url.as_str()).collect();
    assert_eq!(urls, vec![server.url("/"), server.url("/next")]);
    assert!(server.hit_paths().contains(&"/feed.json".to_string()));
}

#[test]
fn depth_limit_prunes_links_not_pages() {
    let server = TestServer::start(routes(&[
        ("/", Route::html(r##"<a href="/b">b</a>"##)),
        ("/b", Route::html(r##"<a href="/c">c</a>"##)),
        ("/c", Route::html("<p>too deep</p>")),
    ]));
    let mut config = quick_config(&server.url("/"));
    config.max_depth = 1;
    let pages = crawl(&config).expect("crawl succeeds");
    let urls: Vec<&str> = pages.iter().map(|p| p.url.as_str()).collect();
    assert_eq!(urls, vec![server.url("/"), server.url("/b")]);
    assert!(!server.hit_paths().contains(&"/c".to_string()));
}

#[test]
fn fragment_and_duplicate_links_fetch_once() {
    let server = TestServer::start(routes(&[
        (
            "/",
            Route::html(
                r##"<a href="/b#intro">intro</a>
                <a href="/b">page</a>
                <a href="/b#usage">usage</a>"##,
            ),
        ),
        ("/b", Route::html("<p>b</p>")),
    ]));
    let pages = crawl(&quick_config(&server.url("/"))).expect("crawl succeeds");
    assert_eq!(pages.len(), 2);
    assert_eq!(server.hit_paths(), vec!["/", "/b"]);
}

#[test]
fn cache_serves_the_second_crawl_without_refetching() {
    let server = TestServer::start(routes(&[
        ("/", Route::html(r##"<a href="/b">b</a>"##)),
        ("/b", Route::html("<p>cached</p>")),
    ]));
    let cache = tempfile::tempdir().expect("tempdir");
    let config = quick_config(&server.url("/"));

    let first = crawl_with_cache(&config, Some(cache.path())).expect("first crawl");
    assert_eq!(server.hit_count(), 2);

    let second = crawl_with_cache(&config, Some(cache.path())).expect("second crawl");
    assert_eq!(server.hit_count(), 2, "second crawl must not refetch");
    assert_eq!(first.len(), second.len());
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(a.url, b.url);
        assert_eq!(a.html, b.html);
        assert_eq!(a.fetch_order, b.fetch_order);
    }
}

#[test]
fn crawler_identifies_itself() {
    let server = TestServer::start(routes(&[("/", Route::html("<p>hello</p>"))]));
    crawl(&quick_config(&server.url("/"))).expect("crawl succeeds");
    let hits = server.hits();
    assert!(
        hits[0].user_agent.contains("docforge/"),
        "user agent was {:?}",
        hits[0].user_agent
    );
}
