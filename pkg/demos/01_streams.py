"""Splittable deterministic streams: same key, same draws, any worker order."""

import numpy as np

from slln_lab import Channel, StreamKey, derive_stream

key = StreamKey(master_seed=2024, path_index=0, channel=Channel.X)
a = derive_stream(key).uniforms(5)
b = derive_stream(key).uniforms(5)
print("same key twice:")
print(" ", a)
print(" ", b)
print("  identical:", np.array_equal(a, b))

sibling = derive_stream(StreamKey(2024, 1, Channel.X)).uniforms(5)
print("sibling path:", sibling)

# splitting draws does not change the stream
s = derive_stream(key)
print("3+2 == 5 draws:", np.array_equal(np.concatenate([s.uniforms(3), s.uniforms(2)]), a))

big = derive_stream(key).uniforms(10 ** 5)
print(f"mean of 1e5 draws: {big.mean():.5f} (uniform mean 0.5)")
