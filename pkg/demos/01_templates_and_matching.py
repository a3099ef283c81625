"""Templates, normalization, and cosine matching.

The matchable unit is a unit-length feature vector tagged with a modality
(shape or colour). Matching is just the dot product of two unit vectors:
the cosine of the angle between them.
"""

import numpy as np

from revid import (
    FusionWeights,
    Modality,
    Template,
    cosine_match,
    decode_template,
    encode_template,
    fuse,
    normalize,
)

rng = np.random.default_rng(0)

# -- normalization ----------------------------------------------------------

raw = Template(Modality.SHAPE, [3.0, 4.0])
unit = normalize(raw)
print("raw [3, 4] normalizes to", unit.values, "(norm", np.linalg.norm(unit.values), ")")

# -- cosine matching --------------------------------------------------------

a = normalize(Template(Modality.SHAPE, rng.standard_normal(64)))
b = normalize(Template(Modality.SHAPE, rng.standard_normal(64)))
print("\nrandom 64-dim templates:")
print("  a vs b  ", cosine_match(a, b).value)
print("  b vs a  ", cosine_match(b, a).value, "(symmetric)")
print("  a vs a  ", cosine_match(a, a).value, "(self match)")

# near-duplicate embeddings score close to 1
noisy = normalize(Template(Modality.SHAPE, a.values + 0.05 * rng.standard_normal(64)))
print("  a vs a+noise", cosine_match(a, noisy).value)

# -- score-level fusion -----------------------------------------------------

# the two modalities produce scores with different distributions, so the
# weighted sum lets calibration decide how much each should count
weights = FusionWeights.weighted(0.7)
print("\nfusing shape 0.82 with colour 0.34 at w_shape=0.7:", fuse(0.82, 0.34, weights))
print("plain-sum variant (similar distributions):", fuse(0.82, 0.34, FusionWeights.plain_sum()))

# -- wire format ------------------------------------------------------------

# the binary format stores float32; one encode/decode pass settles the
# values, after which round trips are bit-exact
payload = encode_template(unit)
print("\nbinary template payload:", len(payload), "bytes, magic", payload[:4])
settled = decode_template(payload)
print("quantization error on first pass:", np.max(np.abs(settled.values - unit.values)))
assert decode_template(encode_template(settled)) == settled
print("decode(encode(t)) == t for wire-clean templates")
