"""Parse a sign-in form, number its elements and cut snippets around one input.

    python demos/01_snippets_and_refs.py
"""

from __future__ import annotations

from pathlib import Path

from htmltasks.dom import assign_refs, find_by_attr, parse_html, serialize, strip_closing_tags
from htmltasks.snippet import ABLATION_GRID, extract_snippet

PAGE = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "signin_form.html"


def main() -> None:
    doc = assign_refs(parse_html(PAGE.read_text()))
    print("page with refs, as a navigation agent sees it:")
    print(serialize(doc, serialize_refs=True), "\n")

    salient = find_by_attr(doc, "id", "uName")[0]
    print(f"salient element: ref={doc.nodes[salient].ref}\n")

    # wider limits can only grow the snippet
    for cfg in ABLATION_GRID:
        snip = extract_snippet(doc, salient, cfg)
        s = snip.stats
        print(f"pct<={cfg.max_new_descendants_pct:>5g} height<={cfg.max_height}: "
              f"hops={s.hops} nodes={s.node_count:>2}  {snip.html[:70]}")

    print("\nwith closing tags stripped (a cheap corruption for robustness data):")
    print(strip_closing_tags(parse_html('<div id="form"><div><input id="username"></div></div>')))


if __name__ == "__main__":
    main()
