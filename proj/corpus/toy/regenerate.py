#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Rebuilds suite.jsonl, patches/ and agents/ from repos/ and FIXES below."""

import json
import pathlib
import shutil
import subprocess
import tempfile

HERE = pathlib.Path(__file__).resolve().parent

# id -> (problem statement, file, old, new, fail_to_pass, pass_to_pass)
FIXES = {
    "off_by_one": (
        "inclusive_range(start, stop) in rangeutil.py is documented to include both ends, "
        "but inclusive_range(1, 4) returns [1, 2, 3] instead of [1, 2, 3, 4].",
        "rangeutil.py",
        "return list(range(start, stop))",
        "return list(range(start, stop + 1))",
        ["tests.test_rangeutil.InclusiveRangeTest.test_includes_upper_bound",
         "tests.test_rangeutil.InclusiveRangeTest.test_single_value"],
        ["tests.test_rangeutil.InclusiveRangeTest.test_reversed_is_empty",
         "tests.test_rangeutil.SpanTest.test_span",
         "tests.test_rangeutil.SpanTest.test_empty"],
    ),
    "slugify": (
        "slugify() in textutil.py should produce lower-case slugs, "
        "but slugify('Hello World') returns 'Hello-World'.",
        "textutil.py",
        'return "-".join(words)',
        'return "-".join(word.lower() for word in words)',
        ["tests.test_textutil.SlugifyTest.test_lowercases"],
        ["tests.test_textutil.SlugifyTest.test_strips_punctuation",
         "tests.test_textutil.TruncateTest.test_short_text_unchanged",
         "tests.test_textutil.TruncateTest.test_long_text"],
    ),
    "stack_pop": (
        "Stack.pop() silently returns None when the stack is empty. "
        "Like list.pop(), it should raise IndexError.",
        "stack.py",
        "            return None",
        '            raise IndexError("pop from empty stack")',
        ["tests.test_stack.StackTest.test_pop_empty_raises"],
        ["tests.test_stack.StackTest.test_push_pop"],
    ),
    "median": (
        "median() in stats.py is wrong for lists of even length: median([4, 1, 3, 2]) "
        "returns 3, but the median of an even-length list is the mean of the two middle values (2.5).",
        "stats.py",
        "    return ordered[mid]",
        "    if len(ordered) % 2 == 0:\n        return (ordered[mid - 1] + ordered[mid]) / 2\n    return ordered[mid]",
        ["tests.test_stats.MedianTest.test_even_length"],
        ["tests.test_stats.MedianTest.test_odd_length", "tests.test_stats.MeanTest.test_mean"],
    ),
    "duration": (
        "parse_duration('2h') returns 720 instead of 7200 seconds. Hours are converted with the wrong factor.",
        "duration.py",
        '"h": 360,',
        '"h": 3600,',
        ["tests.test_duration.ParseDurationTest.test_hours",
         "tests.test_duration.ParseDurationTest.test_mixed"],
        ["tests.test_duration.ParseDurationTest.test_minutes_seconds",
         "tests.test_duration.ParseDurationTest.test_rejects_garbage"],
    ),
    "word_count": (
        "word_counts() is documented as case-insensitive but counts 'The' and 'the' separately.",
        "counter.py",
        "return Counter(text.split())",
        "return Counter(text.lower().split())",
        ["tests.test_counter.WordCountTest.test_case_insensitive"],
        ["tests.test_counter.WordCountTest.test_top_word_empty",
         "tests.test_counter.WordCountTest.test_simple_counts"],
    ),
}

# Fixes the fail_to_pass tests of off_by_one but breaks test_reversed_is_empty.
REGRESSION = ("off_by_one", "rangeutil.py", "return list(range(start, stop))",
              "return list(range(start, stop + 1)) or [start]")


def git(cwd, *args):
    subprocess.run(["git", "-c", "core.autocrlf=false", *args], cwd=cwd, check=True,
                   stdout=subprocess.DEVNULL)


def make_patch(repo, path, old, new):
    with tempfile.TemporaryDirectory() as tmp:
        work = pathlib.Path(tmp) / "w"
        shutil.copytree(HERE / "repos" / repo, work)
        git(work, "init", "-q")
        git(work, "add", "-A")
        git(work, "-c", "user.name=x", "-c", "user.email=x@x", "commit", "-q", "-m", "base")
        target = work / path
        text = target.read_text()
        assert text.count(old) == 1, (repo, old)
        target.write_text(text.replace(old, new))
        return subprocess.run(["git", "diff", "--no-color", "--no-renames"], cwd=work, check=True,
                              capture_output=True, text=True).stdout


def main():
    (HERE / "patches").mkdir(exist_ok=True)
    (HERE / "agents").mkdir(exist_ok=True)
    suite_lines = []
    fixture_scripts = []
    for iid, (problem, path, old, new, f2p, p2p) in FIXES.items():
        (HERE / "patches" / f"{iid}.patch").write_text(make_patch(iid, path, old, new))
        suite_lines.append(json.dumps({
            "id": iid,
            "repo_source": f"repos/{iid}",
            "problem_statement": problem,
            "setup_commands": [],
            "fail_to_pass": f2p,
            "pass_to_pass": p2p,
            "test_command_template": "python3 -m unittest {test}",
            "timeout_seconds": 60,
        }))
        fixture_scripts.append({"instance": iid, "turns": [
            {"content": f"Fixing {path}.",
             "tool_calls": [{"name": "file_edit", "arguments": {
                 "action": "str_replace", "path": path, "old_str": old, "new_str": new}}]},
            {"tool_calls": [{"name": "finish", "arguments": {"message": "Fixed."}}]},
        ]})
    repo, path, old, new = REGRESSION
    (HERE / "patches" / f"{repo}.regression.patch").write_text(make_patch(repo, path, old, new))
    (HERE / "suite.jsonl").write_text("\n".join(suite_lines) + "\n")

    def dump(name, obj):
        (HERE / "agents" / name).write_text(json.dumps(obj, indent=2) + "\n")

    dump("fixture.json", {"scripts": fixture_scripts})
    dump("empty.json", {"queue": [{"tool_calls": [{"name": "finish", "arguments": {"message": "Nothing to do."}}]}]})
    dump("never_finish.json", {"queue": [{"tool_calls": [{"name": "file_edit",
                                                          "arguments": {"action": "view", "path": "."}}]}],
                               "repeat_last": True})


if __name__ == "__main__":
    main()
