"""Hand-encoded maps with hand-derived orders.

Darts ``2i`` and ``2i + 1`` form edge ``i``; rotations are counterclockwise.
"""

from blockmaps.maps import from_edges_rotation

# two parallel edges between u (darts 0, 2) and v (darts 1, 3)
DIGON = from_edges_rotation([[0, 2], [1, 3]], 0)

# a loop at u (darts 0, 1) and a pendant edge u -> v (dart 2 at u, 3 at v);
# the pendant sits in the corner after loop dart 1
LOLLIPOP = from_edges_rotation([[0, 1, 2], [3]], 0)

# path a - b - c
PATH2 = from_edges_rotation([[0], [1, 2], [3]], 0)

# triangle a b c, a loop at b and a pendant edge c -> d
#   e0 a->b (0, 1)   e1 b->c (2, 3)   e2 c->a (4, 5)   e3 c->d (6, 7)   e4 loop at b (8, 9)
DECORATED_TRIANGLE = from_edges_rotation([[0, 5], [1, 8, 9, 2], [3, 6, 4], [7]], 0)
DECORATED_TRIANGLE_CORNERS = [0, 5, 1, 8, 9, 2, 4, 3, 6, 7]
DECORATED_TRIANGLE_TREE = [6, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0]
