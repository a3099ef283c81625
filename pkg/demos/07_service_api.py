"""The HTTP facade, exercised in-process.

Every endpoint is a thin wrapper over the library; this walks the
investigator flow over the wire: enroll, search, switch on mix-mode,
drill into a best-shot's detections.
"""

from fastapi.testclient import TestClient

from revid.colourclass import default_catalog
from revid.config import ServiceConfig
from revid.gallery import Gallery
from revid.service import ServiceState, create_app
from revid.synthgen import SynthConfig, generate
from revid.templates import record_to_json

scenario = generate(SynthConfig(seed=8, n_classes=10, ids_per_class=2, images_per_id=3))
state = ServiceState(ServiceConfig())
state.galleries["demo"] = Gallery.from_records(scenario.gallery)
state.catalog = default_catalog(16)
client = TestClient(create_app(state.config, state=state))

print("GET /v1/health ->", client.get("/v1/health").json())

probe = scenario.probes[0]
body = {"probe": record_to_json(probe), "mode": "shape", "k": 3}
resp = client.post("/v1/galleries/demo/search", json=body).json()
print(f"\nPOST /v1/galleries/demo/search (shape, k=3), diagnostics {resp['diagnostics']}")
for item in resp["results"]:
    print(f"  rank {item['rank']}: {item['record_id']}  score {item['score']:+.4f}"
          f"  colour {item['colour']['label']}")

body["wanted_colour"] = "white"
resp = client.post("/v1/galleries/demo/search", json=body).json()
print(f"\nsame search with wanted_colour=white -> mode {resp['mode']},"
      f" {len(resp['results'])} results, all classified white:")
for item in resp["results"]:
    print(f"  rank {item['rank']}: {item['record_id']}  {item['colour']['label']}")

resp = client.post(
    "/v1/galleries/demo/search",
    json={"probe_ids": [r.record_id for r in scenario.gallery[:3]], "mode": "shape", "k": 3},
).json()
print(f"\nmulti-probe via probe_ids -> {[r['record_id'] for r in resp['results']]}")

resp = client.post("/v1/galleries/nope/search", json=body)
print(f"\nunknown gallery -> {resp.status_code} {resp.json()}")
