"""Every source-sink path projects to the characteristic vector of one order."""
import numpy as np

from orderflow import (build_network, build_projection, characteristic_vector, decode_path,
                       enumerate_orders, enumerate_paths)

n = 3
for kind in ("lo", "wo", "io", "so"):
    net = build_network(n, kind)
    pm = build_projection(net)
    images = set()
    for path in enumerate_paths(net):
        img = pm.path_image(path)
        assert np.array_equal(img, characteristic_vector(decode_path(net, path)))
        images.add(img.tobytes())
    orders = {characteristic_vector(r).tobytes() for r in enumerate_orders(n, kind)}
    print(f"{kind}: {len(images)} distinct images, {len(orders)} orders, equal: {images == orders}")

net = build_network(3, "lo")
first = enumerate_paths(net)[0]
print("first linear path", first, "decodes to", decode_path(net, first))
