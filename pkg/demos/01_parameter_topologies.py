"""The four parameter kinds and the neighborhood graphs they induce.

Each tunable parameter carries an adjacency relation: factorization tuples
are adjacent under single prime moves, permutations under transpositions,
discrete values along their sorted order, and categorical labels all at
once.  This script materializes each graph and prints its shape.
"""

from topotune import Categorical, Discrete, Factorization, Permutation, build_graph, is_connected

spaces = {
    "factorization of 8 into 3 slots": Factorization(8, 3),
    "permutation of 3 labels": Permutation(("i", "j", "k")),
    "discrete values {1,2,3,4}": Discrete((1, 2, 3, 4)),
    "categorical labels a..f": Categorical(("a", "b", "c", "d", "e", "f")),
}

for title, space in spaces.items():
    graph = build_graph(space)
    degrees = graph.degrees()
    print(f"\n== {title} ==")
    print(f"vertices: {len(graph)}, edges: {sum(degrees) // 2}, "
          f"connected: {is_connected(graph)}")
    print(f"degree range: {min(degrees)}..{max(degrees)}")
    for vertex, nbrs in zip(graph.vertices, graph.adjacency):
        shown = ", ".join(str(graph.vertices[j]) for j in nbrs[:4])
        more = " ..." if len(nbrs) > 4 else ""
        print(f"  {vertex!s:>12}  ->  {shown}{more}")

# The tiling graph is the interesting one: balanced tuples sit in the middle
# with high degree, corner tuples like (8,1,1) have only two ways out.
tiling = build_graph(Factorization(8, 3))
print("\nhighest-degree tiling vertex:",
      max(zip(tiling.degrees(), tiling.vertices))[1])
