import random

import pytest

from wilee.dsl import DslSyntaxError, NodeKind, parse


def test_putty_example_shape():
    src = (
        'def t1552_002():\n'
        '  winregistrykey1 = WinRegistryKey()\n'
        '  winregistrykey1.Hive = "Software\\*\\Putty\\Sessions"\n'
    )
    tree = parse(src)
    assert tree.kind is NodeKind.MODULE
    assert len(tree.children) == 1
    fn = tree.children[0]
    assert fn.attrs["name"] == "t1552_002"
    kinds = [stmt.kind for stmt in fn.children]
    assert kinds == [NodeKind.OBJECT_INSTANTIATION, NodeKind.ATTRIBUTE_ASSIGN]
    assign = fn.children[1]
    assert assign.children[1].attrs["value"] == "Software\\*\\Putty\\Sessions"


def test_empty_source_gives_empty_module():
    tree = parse("")
    assert tree.kind is NodeKind.MODULE
    assert tree.children == ()


def test_spans_cover_source():
    src = 'def f():\n    process1 = Process()\n    process1.name = "x"\n'
    tree = parse(src)
    total = len(src.encode("utf-8"))
    assert tree.span == (0, total)
    for fn in tree.children:
        for stmt in fn.children:
            start, end = stmt.span
            assert 0 <= start <= end <= total


def test_spans_are_byte_offsets():
    src = 'def f():\n    process1 = Process()\n    process1.user = "é"\n'
    tree = parse(src)
    literal = tree.children[0].children[1].children[1]
    start, end = literal.span
    assert src.encode("utf-8")[start:end].decode("utf-8") == '"é"'


def test_relation_and_call_statements():
    src = "def f():\n    a = System()\n    b = Process()\n    a.has(b)\n\ndef g():\n    t1059_001()\n    credential_access()\n"
    tree = parse(src)
    rel = tree.children[0].children[2]
    assert rel.kind is NodeKind.RELATION_STMT
    assert rel.attrs["verb"] == "has"
    assert [c.attrs["name"] for c in rel.children] == ["a", "b"]
    calls = tree.children[1].children
    assert [c.attrs["step"] for c in calls] == ["T1059.001", "credential-access"]


def test_bind_forms():
    src = (
        "def f():\n"
        "    p = Process()\n"
        "    p.name = bind(ioc_type=process_name)\n"
        '    p.command_line = bind(ioc_type=command_line, technique="T1059.001", pattern="Get-*")\n'
        '    p.path = bind(ioc_type="file_path")\n'
    )
    tree = parse(src)
    binds = [stmt.children[1] for stmt in tree.children[0].children[1:]]
    assert binds[0].attrs == {"ioc_type": "process_name"}
    assert binds[1].attrs == {
        "ioc_type": "command_line",
        "technique": "T1059.001",
        "pattern": "Get-*",
    }
    assert binds[2].attrs == {"ioc_type": "file_path"}


def test_string_escapes():
    assert (
        parse('def f():\n    p = Process()\n    p.name = "a\\"b"\n')
        .children[0].children[1].children[1].attrs["value"]
        == 'a"b'
    )
    # Lone backslashes are literal; doubled ones collapse.
    assert (
        parse('def f():\n    p = Process()\n    p.name = "C:\\x\\\\y"\n')
        .children[0].children[1].children[1].attrs["value"]
        == "C:\\x\\y"
    )


def test_pass_is_an_empty_body():
    tree = parse("def f():\n    pass\n")
    assert tree.children[0].children == ()


@pytest.mark.parametrize(
    "source, line, fragment",
    [
        ("def f(:\n    pass\n", 1, ")"),
        ("x = Foo()\n", 1, "def"),
        ("def f():\npass\n", 2, "indented"),
        ('def f():\n    p = Process()\n    p.name = "open\n', 3, "unterminated"),
        ("def f():\n    p.q.r = Foo()\n", 2, ""),
        ("def f():\n    a.unknownverb(b)\n", 2, "has"),
        ("def f():\n    p = Process()\n    p.name = bind(bogus=\"x\")\n", 3, "ioc_type"),
        ("def f():\n\tpass\n", 2, "tab"),
        ("def f():\n            pass\n  misplaced = X()\n", 3, "unindent"),
    ],
)
def test_syntax_errors_carry_position(source, line, fragment):
    with pytest.raises(DslSyntaxError) as err:
        parse(source)
    assert err.value.line == line
    assert fragment.lower() in str(err.value).lower()


def test_expected_token_set_reported():
    with pytest.raises(DslSyntaxError) as err:
        parse("def f():\n    a.unknownverb(b)\n")
    assert set(err.value.expected) == {"has", "observed"}


def test_invalid_utf8_bytes_rejected():
    with pytest.raises(DslSyntaxError):
        parse(b"def f():\n    \xff\xfe pass\n")


def test_parse_total_over_random_bytes():
    rng = random.Random(99)
    for _ in range(500):
        blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 120)))
        try:
            parse(blob)
        except DslSyntaxError:
            pass  # the only permitted failure mode


def test_parse_total_over_random_text():
    rng = random.Random(7)
    alphabet = 'def pass():="\\\n\t #abcxyz*_'
    for _ in range(800):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 80)))
        try:
            parse(text)
        except DslSyntaxError:
            pass
