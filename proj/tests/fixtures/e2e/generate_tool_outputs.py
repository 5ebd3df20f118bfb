#!/usr/bin/env python3
"""Writes recorded tool outputs for the end-to-end fixture.

Each Solidity snapshot in files/ gets one output per tool, stored as
tool_outputs/<Tool>/<sha256 of the file content>.out in the tool's native
format. The findings come from findings.json; tools without an entry report
nothing. Rerun after editing a snapshot or findings.json.
"""
import hashlib
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent
FILES = HERE / "files"
OUT = HERE / "tool_outputs"

SMARTCHECK_PATTERNS = {
    "SOLIDITY_CALL_WITHOUT_DATA": "om991k",
    "SOLIDITY_TX_ORIGIN": "12e802",
}


def container_path(snapshot):
    name = snapshot.name
    stem, version, ext = name.rsplit(".", 2)
    return f"/contract/{stem}.{ext}"


def slither(path, items):
    detectors = [
        {
            "check": it["check"],
            "impact": "High",
            "confidence": "Medium",
            "description": f"{it['check']} in {path}#{it['lines'][0]}\n",
            "elements": [
                {
                    "type": "node",
                    "name": it["check"],
                    "source_mapping": {"filename_relative": path, "lines": it["lines"]},
                }
            ],
        }
        for it in items
    ]
    results = {"detectors": detectors} if detectors else {}
    return json.dumps({"success": True, "error": None, "results": results}, indent=2) + "\n"


def mythril(path, items):
    issues = [
        {
            "title": it["title"],
            "swc-id": it["swc"],
            "severity": "Medium",
            "filename": path,
            "lineno": it["line"],
            "description": f"{it['title']} detected.",
        }
        for it in items
    ]
    return json.dumps({"error": None, "issues": issues, "success": True}, indent=2) + "\n"


def solhint(path, items):
    messages = [
        {"ruleId": it["rule"], "severity": 2, "message": f"{it['rule']} violated", "line": it["line"], "column": 9}
        for it in items
    ]
    return json.dumps([{"filePath": path, "messages": messages, "errorCount": len(messages), "warningCount": 0}],
                      indent=2) + "\n"


def smartcheck(path, items):
    lines = [path]
    for it in items:
        lines += [
            f"ruleId: {it['rule']}",
            f"patternId: {SMARTCHECK_PATTERNS.get(it['rule'], '000000')}",
            "severity: 2",
            f"line: {it['line']}",
            "column: 8",
            "content: <elided>",
            "",
        ]
    return "\n".join(lines) + "\n"


def oyente_style(path, kinds):
    lines = [f"INFO:root:contract {path}:Main:", "INFO:symExec:\t============ Results ==========="]
    lines += [f"INFO:symExec:\t  {k}:\t\t\tFalse" for k in kinds]
    lines.append("INFO:symExec:\t====== Analysis Completed ======")
    return "\n".join(lines) + "\n"


def maian(path):
    return "\n".join([
        f"[ ] Compiling Solidity contract from the file {path} ...  Done",
        "[ ] Check if contract is SUICIDAL",
        "[+] No suicidal vulnerability found",
        "[ ] Check if contract is PRODIGAL",
        "[+] No prodigal vulnerability found",
        "[ ] Check if contract is GREEDY",
        "[+] No locking vulnerability found",
    ]) + "\n"


def main():
    findings = json.loads((HERE / "findings.json").read_text())
    for snapshot in sorted(FILES.glob("*.sol")):
        content = snapshot.read_bytes()
        digest = hashlib.sha256(content).hexdigest()
        path = container_path(snapshot)
        f = findings.get(snapshot.name, {})
        outputs = {
            "Slither": slither(path, f.get("Slither", [])),
            "Mythril": mythril(path, f.get("Mythril", [])),
            "Solhint": solhint(path, f.get("Solhint", [])),
            "SmartCheck": smartcheck(path, f.get("SmartCheck", [])),
            "Osiris": oyente_style(path, ["Arithmetic bugs", "Callstack bug", "Concurrency bug", "Timedependency bug",
                                          "Reentrancy bug"]),
            "Honeybadger": oyente_style(path, ["Balance disorder", "Hidden transfer", "Inheritance disorder",
                                               "Uninitialised struct", "Type deduction overflow",
                                               "Skip empty string", "Hidden state update", "Straw man contract"]),
            "Maian": maian(path),
        }
        for tool, text in outputs.items():
            target = OUT / tool / f"{digest}.out"
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(text)


if __name__ == "__main__":
    main()
