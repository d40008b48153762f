"""Record ask-response fixtures for the frontend test suite.

Spins up the mock-backed service in-process, ingests a handful of
synthetic videos, performs 50 asks, and captures the exact wire payloads
(ask response + clip listing) the UI must render verbatim.

Usage: python3 scripts/record_ui_fixtures.py [out_path]
"""
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from fastapi.testclient import TestClient

from goldfish.config import EngineConfig
from goldfish.engine import Engine
from goldfish.service import create_app
from videofix import needle_video

OUT = Path(sys.argv[1]) if len(sys.argv) > 1 else (
    Path(__file__).resolve().parent.parent / "frontend" / "fixtures" / "ask_fixtures.json"
)

N_VIDEOS = 5
CLIPS_PER_VIDEO = 12
ASKS_PER_VIDEO = 10


def main():
    fixtures = []
    with tempfile.TemporaryDirectory() as td:
        engine = Engine(EngineConfig(index_dir=td, clip_window_ms=60_000))
        with TestClient(create_app(engine=engine)) as client:
            for v in range(N_VIDEOS):
                video_id = f"show{v}"
                needle_pos = (v * 3) % CLIPS_PER_VIDEO + 1
                manifest, srt = needle_video(
                    video_id, CLIPS_PER_VIDEO, needle_pos, f"TOKEN-{v:02d}"
                )
                resp = client.post("/videos", json={"manifest": manifest, "subtitles": srt})
                job = client.get(f"/jobs/{resp.json()['job_id']}").json()
                assert job["state"] == "ready", job
                clips = client.get(f"/videos/{video_id}/clips").json()
                for q in range(ASKS_PER_VIDEO):
                    # mix of needle questions and filler-word questions so
                    # scores/kinds vary across fixtures
                    if q % 2 == 0:
                        question = f"Where is TOKEN-{v:02d} mentioned (variant {q})?"
                    else:
                        question = f"What happens around w{(q * 7) % (CLIPS_PER_VIDEO * 2):04d}?"
                    k = 1 + (q % 3)
                    ask = client.post(
                        f"/videos/{video_id}/ask", json={"question": question, "k": k}
                    )
                    assert ask.status_code == 200, ask.text
                    fixtures.append(
                        {
                            "video_id": video_id,
                            "question": question,
                            "k": k,
                            "response": ask.json(),
                            "clips": clips["clips"],
                        }
                    )
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(fixtures, indent=1), encoding="utf-8")
    print(f"wrote {len(fixtures)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
