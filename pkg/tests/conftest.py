from __future__ import annotations

import random
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# tags used by the random page generator; void tags never get children
BLOCK_TAGS = ("div", "span", "p", "form", "section", "ul", "li", "a", "b", "label", "button", "table", "tr", "td")
VOID_LEAVES = ("input", "br", "img", "hr")
WORDS = "email address password first name last city zip phone submit login search enter your the".split()


def random_attrs(rng: random.Random, tag: str) -> str:
    out = []
    if rng.random() < 0.4:
        out.append(f'id="n{rng.randrange(1000)}"')
    if rng.random() < 0.3:
        out.append(f'class="c{rng.randrange(10)} x"')
    if tag == "input":
        out.append(f'type="{rng.choice(["text", "email", "password", "checkbox"])}"')
    if rng.random() < 0.1:
        out.append("disabled")
    return (" " + " ".join(out)) if out else ""


def random_html(rng: random.Random, n_elements: int) -> str:
    """Well-formed random markup with roughly ``n_elements`` elements."""
    budget = [n_elements]

    def build(depth: int) -> str:
        parts = []
        while budget[0] > 0 and (not parts or rng.random() < 0.7):
            budget[0] -= 1
            if rng.random() < 0.25:
                parts.append(rng.choice(WORDS))
            if depth > 6 or rng.random() < 0.3:
                tag = rng.choice(VOID_LEAVES)
                parts.append(f"<{tag}{random_attrs(rng, tag)}>")
                continue
            tag = rng.choice(BLOCK_TAGS)
            inner = build(depth + 1) if rng.random() < 0.8 else rng.choice(WORDS)
            parts.append(f"<{tag}{random_attrs(rng, tag)}>{inner}</{tag}>")
        return "".join(parts)

    return build(0) or "<div></div>"


MALFORMED_SNIPPETS = (
    "<div><span>x",
    "<p>one<p>two<p>three",
    "<b><i>bold italic</b> tail</i>",
    "</div>stray<div>ok</div></span>",
    "<DIV ID=Upper CLASS='q'>Caps</DIV>",
    "<input value=unquoted disabled><input type=\"text\" type=\"dup\">",
    "<ul><li>a<li>b</ul>after",
    "<!-- comment --><div>after comment</div>",
    "<!DOCTYPE html><html><body><div>x</div></body></html>",
    "<script>if (a < b) { x = '</div>'; }</script><div>s</div>",
    "<style>p > a { color: red }</style><p>styled",
    "<table><tr><td>1<td>2</tr><tr><td>3</table>",
    "<a href=\"x\">link <b>bold</a> not closed",
    "text only, no tags at all",
    "<div><br/><img src=x /><hr></div>",
    "<form><label for=a>A</label><input id=a></form></form>",
    "<div title=\"it's\" data-x='say \"hi\"'>quotes</div>",
    "<span>a < b and c > d</span>",
    "<div><div><div>deep",
    "<p>para</p></p></p>",
)


def malformed_page(rng: random.Random) -> str:
    """Concatenate malformed fragments with random well-formed filler."""
    parts = rng.sample(MALFORMED_SNIPPETS, rng.randint(1, 4))
    if rng.random() < 0.5:
        parts.insert(rng.randrange(len(parts) + 1), random_html(rng, rng.randint(1, 10)))
    if rng.random() < 0.2:
        # unterminated tag at end of input
        parts.append('<div class="cut')
    return "".join(parts)


def fixture_pages(n: int = 500, seed: int = 4) -> list[str]:
    """Deterministic page set: every third page is malformed."""
    rng = random.Random(seed)
    pages = []
    for i in range(n):
        if i % 3 == 2:
            pages.append(malformed_page(rng))
        else:
            pages.append(random_html(rng, rng.randint(1, 60)))
    return pages


@pytest.fixture(scope="session")
def signin_form_html() -> str:
    return (FIXTURES / "signin_form.html").read_text("utf-8")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


# one PASS/FAIL line per acceptance criterion in the terminal summary
_CRITERIA: dict[str, tuple[str, float]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rpartition("::")[2]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(name, ("PASS", 0.0))
        status = "PASS" if report.passed and prev[0] == "PASS" else "FAIL"
        _CRITERIA[name] = (status, prev[1] + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA, key=lambda n: int(n.split("_")[2])):
        status, duration = _CRITERIA[name]
        number, _, label = name[len("test_criterion_"):].partition("_")
        terminalreporter.write_line(f"{status} criterion {number}: {label.replace('_', ' ')} ({duration:.2f}s)")
