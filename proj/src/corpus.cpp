#include "qlr/corpus.hpp"

namespace qlr {

const std::vector<CorpusEntry>& soundness_corpus() {
    static const std::vector<CorpusEntry> corpus = {
        {"add-curried", R"(\x:Real. (\a:Real. \b:Real. add a b) x 2.0)"},
        {"add-closed", R"((\x:Real. \y:Real. add x y) 1.0 2.0)"},
        {"twice-sin", R"((\f:Real->Real. \x:Real. f (f x)) (\y:Real. sin y))"},
        {"square-at-half", R"((\f:Real->Real. f 0.5) (\y:Real. mul y y))"},
        {"pair-sum", R"((\p:Real*Real. (\s:Real. add s (snd p)) (fst p)) (1.0, 2.0))"},
        {"sin-of-double", R"(\x:Real. (\y:Real. sin y) ((\z:Real. mul z 2.0) x))"},
        {"cos-at-one", R"((\g:(Real->Real)->Real. g cos) (\h:Real->Real. h 1.0))"},
        {"snd-of-graph", R"(\x:Real. snd ((\y:Real. (y, (\z:Real. sin z) y)) x))"},
        {"diagonal", R"((\k:Real->Real->Real. \x:Real. (\y:Real. k y y) x) add)"},
        {"scaled-apply", R"(\x:Real. \y:Real. (\f:Real->Real. f y) (\z:Real. mul x z))"},
        {"compose", R"((\f:Real->Real. \g:Real->Real. \x:Real. g (f x)) sin cos)"},
        {"snd-succ", R"(snd ((\x:Real. (\y:Real. (x, add y 1.0)) x) 3.0))"},
        {"max-abs", R"((\x:Real. max x (abs x)) ((\y:Real. affine[2.0,-1.0] y) 0.25))"},
        {"sin-cos-product", R"(\x:Real. (\p:Real*Real. (\a:Real. mul a (snd p)) (fst p)) (sin x, cos x))"},
        {"twice-twice",
         R"((\t:(Real->Real)->Real->Real. \f:Real->Real. t (t f)) (\g:Real->Real. \x:Real. g (g x)) sin)"},
        {"min-abs", R"(\x:Real. (\y:Real. \z:Real. min y z) x (abs x))"},
        {"affine-closure", R"(((\c:Real. \x:Real. add (mul c x) c) 0.5) 2.0)"},
        {"twice-at-one", R"(\f:Real->Real. (\g:Real->Real. \x:Real. g (g x)) f 1.0)"},
        {"shifted-square", R"(\x:Real. (\f:Real->Real. (\y:Real. f (add y x)) ((\z:Real. mul z z) x)) sin)"},
        {"pair-apply", R"((\p:(Real->Real)*Real. (\f:Real->Real. f (snd p)) (fst p)) (sin, 0.7))"},
        {"max-negation", R"(\x:Real. (\u:Real*Real. max (fst u) (snd u)) ((\v:Real. (v, mul -1.0 v)) x))"},
        {"pair-of-fn", R"((\f:Real->Real. (f, f 1.0)) (\y:Real. cos (mul y y)))"},
        {"binary-fn-arg", R"(\x:Real. (\f:Real->Real->Real. f x (sin x)) (\a:Real. \b:Real. add a (mul b b)))"},
        {"let-chain", R"((\n:Real. (\m:Real. mul n m) (add n 1.0)) 2.0)"},
        {"nested-let", R"(\x:Real. (\y:Real. (\z:Real. add y z) (cos y)) (sin x))"},
        {"thrice-affine", R"((\h:Real->Real. \x:Real. h (h (h x))) (\y:Real. affine[0.5,0.1] y))"},
        {"higher-order-arg", R"(\f:(Real->Real)->Real. f ((\a:Real. \b:Real. add a b) ((\c:Real. c) 1.0)))"},
        {"abs-then-mul", R"(\w:Real. (\x:Real. \y:Real. mul x y) ((\z:Real. abs z) -2.0) w)"},
        {"nested-pair", R"(\x:Real. fst (snd ((\y:Real. (y, ((\z:Real. sin z) y, y))) x)))"},
    };
    return corpus;
}

} // namespace qlr
