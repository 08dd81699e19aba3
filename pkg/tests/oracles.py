"""Hand-derived (state, rule, successor) triples, at least three per rule."""

STATE_PAIRS = {
    "Query": [
        ("i: {(g (f a))} k: {(= (f $x) ($x $x))}", "i: {} k: {(= (f $x) ($x $x))} w: {(g (a a))}"),
        ("i: {(f b)} k: {(= (f $x) (h $x))}", "k: {(= (f $x) (h $x))} w: {(h b)}"),
        ("i: {c} k: {(= c d) (= c e)}", "k: {(= c d) (= c e)} w: {d e}"),
        ("i: {(f a)} k: {(= (f $x) ($x $x)) (= (f a) done)}",
         "k: {(= (f $x) ($x $x)) (= (f a) done)} w: {(a a) done}"),
    ],
    "Chain": [
        ("w: {(f a)} k: {(= (f $x) (g $x))}", "k: {(= (f $x) (g $x))} w: {(g a)}"),
        ("w: {(h (f c))} k: {(= (f $y) $y)}", "k: {(= (f $y) $y)} w: {(h c)}"),
        ("w: {p p} k: {(= p q)}", "k: {(= p q)} w: {p q}"),
    ],
    "Transform": [
        ("i: {(transform (p $x) (q $x))} k: {(p a) (p b)}", "k: {(p a) (p b)} w: {(q a) (q b)}"),
        ("i: {(transform (p $x) $x)} k: {(r (p c))}", "k: {(r (p c))} w: {(r c)}"),
        ("i: {(transform nothing found)} k: {a}", "k: {a}"),
    ],
    "AddAtom1": [
        ("i: {(addAtom a)}", "k: {a} o: {()}"),
        ("i: {(addAtom (= x y))} k: {b}", "k: {b (= x y)} o: {()}"),
        ("i: {(addAtom a)} k: {a}", "k: {a a} o: {()}"),
    ],
    "AddAtom2": [
        ("i: {(f a)} k: {(addAtom b) (= (f $x) $x)}", "k: {(addAtom b) (= (f $x) $x) b} w: {a} o: {()}"),
        ("w: {u} k: {(addAtom v)}", "k: {(addAtom v) v} o: {u ()}"),
        ("i: {(+ 1 2)} k: {(addAtom n)}", "k: {(addAtom n) n} o: {3 ()}"),
    ],
    "RemAtom1": [
        ("i: {(remAtom a)} k: {a b}", "k: {b} o: {()}"),
        ("i: {(remAtom a)} k: {a a}", "k: {a} o: {()}"),
        ("i: {(remAtom {x y})} k: {{y x}}", "o: {()}"),
    ],
    "RemAtom2": [
        ("w: {u} k: {(remAtom v) v}", "k: {(remAtom v)} o: {u ()}"),
        ("i: {(+ 1 1)} k: {(remAtom n) n n}", "k: {(remAtom n) n} o: {2 ()}"),
        ("i: {(addAtom z)} k: {(remAtom z) z}", "k: {(remAtom z) z} o: {() ()}"),
    ],
    "Output": [
        ("w: {done}", "o: {done}"),
        ("w: {(g (a a))} k: {(= (f $x) ($x $x))}", "k: {(= (f $x) ($x $x))} o: {(g (a a))}"),
        ("w: {b} o: {b}", "o: {b b}"),
    ],
    "BoolAdd1": [
        ("i: {(+ true false)}", "o: {true}"),
        ("i: {(+ false false)}", "o: {false}"),
        ("i: {(+ true true)}", "o: {true}"),
    ],
    "BoolAdd2": [
        ("w: {(+ false true)}", "o: {true}"),
        ("w: {(+ false false)}", "o: {false}"),
        ("w: {(+ true true)} o: {x}", "o: {x true}"),
    ],
    "BoolMult1": [
        ("i: {(* true false)}", "o: {false}"),
        ("i: {(* true true)}", "o: {true}"),
        ("i: {(* false false)}", "o: {false}"),
    ],
    "BoolMult2": [
        ("w: {(* true true)}", "o: {true}"),
        ("w: {(* false true)}", "o: {false}"),
        ("w: {(* true false)} i: {a}", "i: {a} o: {false}"),
    ],
    "NumAdd1": [
        ("i: {(+ 2 3)}", "o: {5}"),
        ("i: {(+ -4 1)}", "o: {-3}"),
        ("i: {(+ 1.5 2.25)}", "o: {3.75}"),
    ],
    "NumAdd2": [
        ("w: {(+ 0 0)}", "o: {0}"),
        ("w: {(+ 7u 8u)}", "o: {15u}"),
        ("w: {(+ 10 -10)}", "o: {0}"),
    ],
    "NumMult1": [
        ("i: {(* 6 7)}", "o: {42}"),
        ("i: {(* -2 3)}", "o: {-6}"),
        ("i: {(* 3u 0u)}", "o: {0u}"),
    ],
    "NumMult2": [
        ("w: {(* 2 2)}", "o: {4}"),
        ("w: {(* 0.5 4.0)}", "o: {2.0}"),
        ("w: {(* 1 -1)}", "o: {-1}"),
    ],
    "StrAdd1": [
        ('i: {(+ "ab" "cd")}', 'o: {"abcd"}'),
        ('i: {(+ "" "x")}', 'o: {"x"}'),
        ('i: {(+ "a b" "")}', 'o: {"a b"}'),
    ],
    "StrAdd2": [
        ('w: {(+ "x" "y")}', 'o: {"xy"}'),
        ('w: {(+ "" "")}', 'o: {""}'),
        ('w: {(+ "1" "2")}', 'o: {"12"}'),
    ],
}
