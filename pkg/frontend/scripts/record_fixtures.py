#!/usr/bin/env python3
"""Record /api/v1 responses from a live server into tests/fixtures/.

Run from frontend/ (or anywhere): starts the backend on a free port with
the 12-record test catalog, replays the scripted calls, writes one JSON
file per response, and stops the server. Re-run after API changes.
"""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import tempfile
import time
import urllib.request
from pathlib import Path

FRONTEND = Path(__file__).resolve().parents[1]
REPO = FRONTEND.parent
FIXTURES = FRONTEND / "tests" / "fixtures"
CATALOG = REPO / "tests" / "data" / "catalog12.json"


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def call(base: str, method: str, path: str, body: dict | None = None) -> dict:
    data = None if body is None else json.dumps(body).encode()
    request = urllib.request.Request(
        base + path, data=data, method=method, headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(request) as response:
        return json.load(response)


def save(name: str, doc: dict) -> None:
    path = FIXTURES / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"recorded {path.relative_to(FRONTEND)}")


def main() -> int:
    port = free_port()
    base = f"http://127.0.0.1:{port}"
    with tempfile.TemporaryDirectory() as tmp:
        snapshot = Path(tmp) / "catalog.snapshot.json"
        subprocess.run(
            [sys.executable, "-m", "facetscope.cli", "ingest", "--input", str(CATALOG),
             "--out", str(snapshot), "--source-label", "fixture"],
            check=True,
        )
        server = subprocess.Popen(
            [sys.executable, "-m", "facetscope.cli", "serve", "--snapshot", str(snapshot),
             "--port", str(port)],
        )
        try:
            for _ in range(100):
                try:
                    call(base, "GET", "/api/v1/health")
                    break
                except OSError:
                    time.sleep(0.1)
            else:
                raise RuntimeError("server never became healthy")

            save("health.json", call(base, "GET", "/api/v1/health"))
            save("facets.json", call(base, "GET", "/api/v1/facets"))
            save(
                "values_modality_all.json",
                call(base, "POST", "/api/v1/facets/modality/values", {"filter": {"clauses": {}}}),
            )
            qa_filter = {"clauses": {"task_categories": ["question-answering"]}}
            save(
                "values_modality_qa.json",
                call(base, "POST", "/api/v1/facets/modality/values", {"filter": qa_filter}),
            )
            save(
                "values_size_qa.json",
                call(base, "POST", "/api/v1/facets/size_categories/values", {"filter": qa_filter}),
            )

            s1_body = {
                "filter": {
                    "clauses": {
                        "task_categories": ["question-answering"],
                        "size_categories": ["1M<n<10M"],
                    }
                },
                "topology": {
                    "source": "dataset", "target": "modality",
                    "link": "task_categories", "thematic": None,
                },
            }
            save("network_s1.json", call(base, "POST", "/api/v1/network", s1_body))

            s2_body = {
                "filter": qa_filter,
                "topology": {
                    "source": "task_categories", "target": "task_categories",
                    "link": "dataset", "thematic": "license",
                },
            }
            session2 = call(base, "POST", "/api/v1/sessions", s2_body)
            save("session_s2.json", session2)
            sid2, root2 = session2["session_id"], session2["root_view_id"]
            ego = call(
                base, "POST", f"/api/v1/sessions/{sid2}/views",
                {"parent": root2, "kind": "egocentric", "selection": {"node": "question-answering"}},
            )
            save("view_ego_s2.json", ego)
            save(
                "view_listing_s2.json",
                call(
                    base, "POST", f"/api/v1/sessions/{sid2}/views",
                    {
                        "parent": ego["view_id"], "kind": "listing",
                        "selection": {"pair": ["question-answering", "visual-question-answering"]},
                    },
                ),
            )
            save(
                "view_temporal_s2.json",
                call(
                    base, "POST", f"/api/v1/sessions/{sid2}/views",
                    {
                        "parent": root2, "kind": "temporal",
                        "selection": {"edge": ["question-answering", "table-question-answering"]},
                    },
                ),
            )

            s3_body = {
                "filter": {"clauses": {"modality": ["audio"]}},
                "topology": {
                    "source": "dataset", "target": "dataset",
                    "link": "model", "thematic": None,
                },
            }
            session3 = call(base, "POST", "/api/v1/sessions", s3_body)
            save("session_s3.json", session3)
            save(
                "view_listing_s3.json",
                call(
                    base, "POST", f"/api/v1/sessions/{session3['session_id']}/views",
                    {
                        "parent": session3["root_view_id"], "kind": "listing",
                        "selection": {"node": "voicehub/common-speech"},
                    },
                ),
            )

            save("record_vqa.json", call(base, "GET", "/api/v1/records/acme/vqa-pics"))
        finally:
            server.terminate()
            server.wait(timeout=10)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
