"""Reference program corpus.

A library of small loop-equation IR programs exercising the full surface
grammar and every rewrite strategy: a batched matmul, elementwise and
scan/recurrence forms, multi-segment expressions, and one worked example per
strategy (input program plus, where useful, a hand-written expected shape of
the output).  Used by the round-trip and strategy-equivalence test suites.
"""

from __future__ import annotations

FIG_MATMUL = (
    "B^{719}_{tx=0}L^{549}_{a=0}L^{128}_{c=0}L^{591}_{d=0}"
    "[D^{f64,g}_{tx,a,c}=D^{f64,g}_{tx,a,c}+A^{f64,g}_{tx,a,d}*C^{f64,g}_{tx,d,c};];"
)

BIAS_ADD = "B^{8}_{tx=0}L^{16}_{a=0}[C^{f32,s}_{tx*16+a}=As^{f32,s}_{tx*16+a}+1;];"

TWO_NESTS = (
    "L^{4}_{a=0}[C^{f32,g}_{a}=A^{f32,g}_{a}*3;D^{f32,g}_{a}=A^{f32,g}_{a}*2+1;];"
    "L^{4}_{a=0}[H^{f32,g}_{a}=A^{f32,g}_{a}*2;];"
)

# matmul + scaling + residual add pipeline and a heavily annotated variant
PIPELINE_RESIDUAL = (
    "B^{457}_{tx=0}L^{2265}_{a=0}L^{3520}_{c=0}[D^{f32,g}_{tx,a}=D^{f32,g}_{tx,a}+A^{f32,g}_{tx,c}*I^{f32,g}_{a,c};];"
    "B^{457}_{tx=0}L^{2265}_{a=0}[D^{f32,g}_{tx,a}=D^{f32,g}_{tx,a}+J^{f32,g}_{a};];"
    "B^{457}_{tx=0}L^{2265}_{a=0}[E^{f32,g}_{tx,a}=D^{f32,g}_{tx,a}*H^{f32,g}_{a};];"
    "B^{457}_{tx=0}L^{2265}_{a=0}[F^{f32,g}_{tx,a}=E^{f32,g}_{tx,a}+C^{f32,g}_{tx,a};];"
)

PIPELINE_RESIDUAL_OPTIMIZED = (
    "B^{457}_{tx=0}L^{3520}_{c=0}[M^{f32,l}_{c,tx}=A^{f32,g}_{tx,c};];"
    "B^{457}_{tx=0}L^{3520}_{c=0}[K^{f32,g}_{c,tx}=M^{f32,l}_{c,tx};];"
    "B^{457}_{tx=0}U^{3520}_{c=0}[N^{f32,g}_{c*457+tx}=K^{f32,g}_{c,tx};];"
    "B^{457}_{tx=0}B^{2265}_{bxa=0}U^{3520}_{c=0}[D^{f32,s}_{tx,bxa}=D^{f32,s}_{tx,bxa}+N^{f32,g}_{c*457+tx}*I^{f32,g}_{bxa,c};];"
    "B^{457}_{tx=0}B^{2265}_{bza=0}[D^{f32,s}_{tx,bza}=D^{f32,s}_{tx,bza}+J^{f32,g}_{bza};];"
    "B^{457}_{tx=0}B^{2265}_{bza=0}[E^{f32,g}_{tx,bza}=D^{f32,s}_{tx,bza}*H^{f32,g}_{bza};];"
    "B^{457}_{tx=0}B^{5}_{bxf=0}L^{453}_{a=0}[F^{f32,g}_{tx,bxf*453+a}=E^{f32,g}_{tx,bxf*453+a}+C^{f32,g}_{tx,bxf*453+a};];"
)

# gemm + swish + divide + clamp + tanh + clamp pipeline
PIPELINE_GEMM_SWISH = (
    "B^{728}_{tx=0}B^{1243}_{bxa=0}L^{2022}_{c=0}[C^{f32,g}_{tx,bxa}=C^{f32,g}_{tx,bxa}+A^{f32,g}_{tx,c}*J^{f32,g}_{bxa,c};];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[C^{f32,g}_{tx,a}=C^{f32,g}_{tx,a}+K^{f32,g}_{a};];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[F^{f32,g}_{tx,a}=0.5*C^{f32,g}_{tx,a}/(1+exp(-C^{f32,g}_{tx,a}));];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[G^{f32,g}_{tx,a}=min(max(F^{f32,g}_{tx,a},-1.0),1.0);];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[M^{f32,g}_{tx,a}=exp(G^{f32,g}_{tx,a})-exp(-G^{f32,g}_{tx,a});];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[N^{f32,g}_{tx,a}=exp(G^{f32,g}_{tx,a})+exp(-G^{f32,g}_{tx,a});];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[H^{f32,g}_{tx,a}=M^{f32,g}_{tx,a}/N^{f32,g}_{tx,a};];"
    "B^{728}_{tx=0}L^{1243}_{a=0}[I^{f32,g}_{tx,a}=min(max(H^{f32,g}_{tx,a},-1.0),1.0);];"
)

# Strategy worked examples: canonical input program per strategy, plus the
# reference transformed shape where one exists.  A few inputs are
# reconstructed minimal programs (marked below) when only the transformed
# side is illustrative on its own.

FUSION_INPUT = (
    "B^{478}_{tx=0}L^{478}_{a=0}[E^{f16,g}_{tx,a}=if_then_else(tx>=a,C^{f16,g}_{tx,a},0);];"
    "B^{478}_{tx=0}L^{478}_{a=0}[D^{f16,g}_{tx,a}=if_then_else(tx>=a,A^{f16,g}_{tx,a},0);];"
)
FUSION_OUTPUT = (
    "B^{478}_{tx=0}L^{478}_{a=0}"
    "[D^{f16,g}_{tx,a}=if_then_else(tx>=a,A^{f16,g}_{tx,a},0);"
    "E^{f16,g}_{tx,a}=if_then_else(tx>=a,C^{f16,g}_{tx,a},0);];"
)

FISSION_INPUT = (
    "B^{975}_{tx=0}L^{10081}_{a=0}"
    "[C^{f64,s}_{tx,a}=1/(1+exp(-A^{f64,g}_{tx,a}));"
    "D^{f64,s}_{tx,a}=A^{f64,g}_{tx,a}*C^{f64,s}_{tx,a};];"
)
FISSION_OUTPUT = (
    "B^{975}_{tx=0}L^{10081}_{a=0}[C^{f64,s}_{tx,a}=1/(1+exp(-A^{f64,g}_{tx,a}));];"
    "B^{975}_{tx=0}L^{10081}_{a=0}[D^{f64,s}_{tx,a}=A^{f64,g}_{tx,a}*C^{f64,s}_{tx,a};];"
)

INLINE_INPUT = (
    "B^{175}_{tx=0}L^{28272}_{a=0}[C^{f16,g}_{tx,a}=abs(A^{f16,g}_{tx,a});];"
    "B^{175}_{tx=0}L^{28272}_{a=0}[F^{f16,g}_{tx,0}=F^{f16,g}_{tx,0}+C^{f16,g}_{tx,a};];"
)
INLINE_OUTPUT = (
    "B^{175}_{tx=0}L^{28272}_{a=0}[F^{f16,g}_{tx,0}=F^{f16,g}_{tx,0}+abs(A^{f16,g}_{tx,a});];"
)

EXPR_SPLIT_INPUT = (
    "B^{929}_{tx=0}L^{10637}_{a=0}"
    "[E^{f32,g}_{tx,a}=exp(D^{f32,g}_{tx,a}-F^{f32,g}_{tx})/G^{f32,g}_{tx};];"
)
EXPR_SPLIT_OUTPUT = (
    "B^{929}_{tx=0}L^{10637}_{a=0}[J^{f32,g}_{tx,a}=exp(D^{f32,g}_{tx,a}-F^{f32,g}_{tx});];"
    "B^{929}_{tx=0}L^{10637}_{a=0}[E^{f32,g}_{tx,a}=J^{f32,g}_{tx,a}/G^{f32,g}_{tx};];"
)

CONCAT_FUSE_INPUT = (
    "B^{99}_{tx=0}L^{1167}_{a=0}L^{450}_{c=0}[D^{f32,g}_{tx,a,c}=exp(A^{f32,g}_{tx,a,c});];"
    "B^{99}_{tx=0}L^{450}_{a=0}L^{365}_{c=0}[E^{f32,g}_{tx,a,c}=exp(C^{f32,g}_{tx,a,c});];"
)
CONCAT_FUSE_OUTPUT = (
    "B^{99}_{tx=0}L^{1167}_{a=0}L^{450}_{c=0}[G^{f32,g}_{tx,a,c}=A^{f32,g}_{tx,a,c};];"
    "B^{99}_{tx=0}L^{450}_{a=0}L^{365}_{c=0}[G^{f32,g}_{tx,a+1167,c+450}=C^{f32,g}_{tx,a,c};];"
    "B^{99}_{tx=0}L^{1617}_{a=0}L^{815}_{c=0}[H^{f32,g}_{tx,a,c}=exp(G^{f32,g}_{tx,a,c});];"
    "B^{99}_{tx=0}L^{1167}_{a=0}L^{450}_{c=0}[D^{f32,g}_{tx,a,c}=H^{f32,g}_{tx,a,c};];"
    "B^{99}_{tx=0}L^{450}_{a=0}L^{365}_{c=0}[E^{f32,g}_{tx,a,c}=H^{f32,g}_{tx,a+1167,c+450};];"
)

SPLIT_DECOUPLE_INPUT = (
    "B^{687}_{tx=0}L^{217}_{a=0}"
    "[C^{f32,g}_{tx,a}=max(0,min(1,(A^{f32,g}_{tx,a}+3)/6));];"
)
SPLIT_DECOUPLE_OUTPUT = (
    "B^{57}_{tx=0}L^{217}_{a=0}[D^{f32,g}_{tx,a}=A^{f32,g}_{tx,a};];"
    "B^{630}_{tx=0}L^{217}_{a=0}[E^{f32,g}_{tx,a}=A^{f32,g}_{tx+57,a};];"
    "B^{57}_{tx=0}L^{217}_{a=0}[F^{f32,g}_{tx,a}=max(0,min(1,(D^{f32,g}_{tx,a}+3)/6));];"
    "B^{630}_{tx=0}L^{217}_{a=0}[G^{f32,g}_{tx,a}=max(0,min(1,(E^{f32,g}_{tx,a}+3)/6));];"
    "B^{57}_{tx=0}L^{217}_{a=0}[C^{f32,g}_{tx,a}=F^{f32,g}_{tx,a};];"
    "B^{630}_{tx=0}L^{217}_{a=0}[C^{f32,g}_{tx+57,a}=G^{f32,g}_{tx,a};];"
)

# reconstructed input: a sigmoid-like body reading exp(A) twice
CSE_INPUT = (
    "B^{917}_{tx=0}L^{30201}_{a=0}"
    "[C^{f64,g}_{tx,a}=exp(A^{f64,g}_{tx,a})/(1+exp(A^{f64,g}_{tx,a}));];"
)
CSE_OUTPUT = (
    "B^{917}_{tx=0}L^{30201}_{a=0}"
    "[F^{f64,g}_{tx,a}=exp(A^{f64,g}_{tx,a});"
    "C^{f64,g}_{tx,a}=F^{f64,g}_{tx,a}/(1+F^{f64,g}_{tx,a});];"
)

REORDER_INPUT = (
    "B^{448}_{tx=0}L^{2}_{a=0}L^{549}_{c=0}L^{549}_{d=0}L^{154}_{f=0}"
    "[Q^{f64,g}_{tx,a,c,d}=Q^{f64,g}_{tx,a,c,d}+K^{f64,g}_{tx,a,c,f}*O^{f64,g}_{tx,a,f,d};];"
    "B^{1}_{tx=0}[R^{f64,g}=154;];"
)

LOOP_REORDER_INPUT = (
    "B^{55}_{tx=0}L^{277}_{a=0}L^{4}_{c=0}L^{124}_{d=0}"
    "[Ad^{f16,g}_{tx,a,c,d}=Ac^{f16,g}_{tx,a,c,d};];"
)
LOOP_REORDER_OUTPUT = (
    "B^{55}_{tx=0}L^{124}_{d=0}L^{4}_{c=0}L^{277}_{a=0}"
    "[Ad^{f16,g}_{tx,a,c,d}=Ac^{f16,g}_{tx,a,c,d};];"
)

LOOP_TILING_INPUT = (
    "B^{255}_{tx=0}L^{255}_{a=0}L^{255}_{c=0}"
    "[D^{f16,g}_{tx,a}=D^{f16,g}_{tx,a}+A^{f16,g}_{tx,c}*C^{f16,g}_{c,a};];"
)
LOOP_TILING_OUTPUT = (
    "L^{15}_{g=0}L^{3}_{h=0}B^{17}_{tx=0}L^{85}_{a=0}L^{255}_{c=0}"
    "[D^{f16,g}_{g*17+tx,h*85+a}=D^{f16,g}_{g*17+tx,h*85+a}"
    "+A^{f16,g}_{g*17+tx,c}*C^{f16,g}_{c,h*85+a};];"
)

LOOP_SPLIT_INPUT = (
    "B^{16}_{tx=0}L^{16384}_{a=0}[E^{f16,g}_{tx,a}=A^{f16,g}_{tx,a}/D^{f16,g}_{tx,a};];"
)
LOOP_SPLIT_OUTPUT = (
    "L^{4}_{f=0}B^{4}_{tx=0}L^{16384}_{a=0}"
    "[E^{f16,g}_{f*4+tx,a}=A^{f16,g}_{f*4+tx,a}/D^{f16,g}_{f*4+tx,a};];"
)

LOOP_FUSION_INPUT = (
    "L^{2}_{f=0}B^{114}_{tx=0}L^{491}_{a=0}"
    "[E^{f32,g}_{a,f*114+tx}=C^{f32,g}_{f*114+tx,a};];"
)
LOOP_FUSION_OUTPUT = (
    "B^{228}_{tx=0}L^{491}_{a=0}[E^{f32,g}_{a,tx}=C^{f32,g}_{tx,a};];"
)

UNROLL_INPUT = (
    "B^{16}_{tx=0}L^{32}_{a=0}L^{64}_{c=0}L^{64}_{d=0}L^{2}_{f=0}L^{2}_{g=0}"
    "[C^{f64,g}_{tx,a,c,d}=max(C^{f64,g}_{tx,a,c,d},D^{f64,g}_{tx,a,c*2+f*3,d*2+g*3});];"
)

PARALLELIZE_INPUT = (
    "B^{851}_{tx=0}L^{36}_{a=0}L^{979}_{c=0}L^{36}_{d=0}"
    "[E^{f32,g}_{tx,a,c,d}=if_then_else(1<=c<978&2<=d<34,A^{f32,g}_{tx,a,c-1,d-2},0);];"
)

VECTORIZE_INPUT = (
    "B^{178}_{tx=0}L^{105}_{a=0}L^{1}_{c=0}[F^{f64,g}_{tx,a,c,0}=E^{f64,g}_{tx,a,c};];"
)

BINDING_INPUT = (
    "B^{595}_{tx=0}L^{71}_{a=0}L^{595}_{c=0}"
    "[E^{f16,g}_{tx,a}=E^{f16,g}_{tx,a}+D^{f16,g}_{tx,c}*C^{f16,g}_{c,a};];"
)
BINDING_OUTPUT = (
    "B^{595}_{tx=0}B^{71}_{bza=0}L^{595}_{c=0}"
    "[E^{f16,g}_{tx,bza}=E^{f16,g}_{tx,bza}+D^{f16,g}_{tx,c}*C^{f16,g}_{c,bza};];"
)

REDUCTION_FACTOR_INPUT = (
    "B^{32}_{tx=0}L^{4}_{a=0}L^{2}_{c=0}L^{1186}_{d=0}L^{5875}_{f=0}"
    "[F^{f32,g}_{tx,a}=F^{f32,g}_{tx,a}+A^{f32,g}_{tx,a*2+c,d,f};];"
)
REDUCTION_FACTOR_PARTS = (
    "B^{32}_{tx=0}L^{4}_{a=0}L^{1186}_{d=0}L^{5875}_{f=0}"
    "[F^{f32,g}_{tx,a}=F^{f32,g}_{tx,a}+(K^{f32,g}_{tx,a}+M^{f32,g}_{tx,a});];"
    "B^{32}_{tx=0}L^{4}_{a=0}L^{1}_{c=0}L^{1186}_{d=0}L^{5875}_{f=0}"
    "[K^{f32,g}_{tx,a}=K^{f32,g}_{tx,a}+A^{f32,g}_{tx,a*2+c,d,f};];"
    "B^{32}_{tx=0}L^{4}_{a=0}L^{1}_{c=0}L^{1186}_{d=0}L^{5875}_{f=0}"
    "[M^{f32,g}_{tx,a}=M^{f32,g}_{tx,a}+A^{f32,g}_{tx,a*2+c+1,d,f};];"
)

CACHE_RW_INPUT = "B^{413}_{tx=0}L^{892}_{a=0}[D^{f32,g}_{tx,a}=log(A^{f32,g}_{tx,a});];"
CACHE_RW_PARTS = (
    "B^{413}_{tx=0}L^{892}_{a=0}[D^{f32,g}_{tx,a}=I^{f32,l}_{tx,a};];"
    "B^{413}_{tx=0}L^{892}_{a=0}[I^{f32,l}_{tx,a}=log(A^{f32,g}_{tx,a});];"
)

# reconstructed input: a plain 2-D consumer of A
LAYOUT_INPUT = "B^{847}_{tx=0}L^{3182}_{c=0}[D^{f16,g}_{tx,c}=A^{f16,g}_{tx,c}*2;];"
LAYOUT_COPY = (
    "L^{11}_{g=0}B^{77}_{tx=0}L^{3182}_{c=0}[E^{f16,g}_{g,tx,c}=A^{f16,g}_{g*77+tx,c};];"
)

# reconstructed input: a reduction producing an intermediate E read later
SET_SCOPE_INPUT = (
    "B^{64}_{tx=0}L^{128}_{a=0}[E^{f32,g}_{tx}=E^{f32,g}_{tx}+A^{f32,g}_{tx,a};];"
    "B^{64}_{tx=0}[C^{f32,g}_{tx}=E^{f32,g}_{tx}/128;];"
)

# reconstructed input: an intermediate D accessed by (tx, a) everywhere
SET_LAYOUT_INPUT = (
    "B^{311}_{tx=0}L^{64}_{a=0}[D^{f32,g}_{tx,a}=A^{f32,g}_{tx,a}*2;];"
    "B^{311}_{tx=0}L^{64}_{a=0}[C^{f32,g}_{tx,a}=D^{f32,g}_{tx,a}+1;];"
)

PRECOMPUTE_INPUT = (
    "B^{99}_{tx=0}L^{26}_{a=0}L^{36}_{c=0}L^{253}_{d=0}L^{109}_{f=0}L^{3}_{g=0}L^{1}_{h=0}"
    "[C^{f32,g}_{tx,a,c,d}=C^{f32,g}_{tx,a,c,d}"
    "+E^{f32,g}_{tx,f,c*3+g,d*3+h}*D^{f32,g}_{a,f,g,h};];"
)
PRECOMPUTE_COPY = "L^{36}_{c=0}L^{3}_{g=0}[F^{i64,g}_{c,g}=c*3+g;];"

FACTORIZATION_INPUT = (
    "B^{166}_{tx=0}L^{13601}_{a=0}"
    "[C^{f64,g}_{tx,a}=max(0,min(1,(A^{f64,g}_{tx,a}+3)/6));];"
)
FACTORIZATION_OUTPUT = (
    "B^{166}_{tx=0}L^{13601}_{a=0}"
    "[C^{f64,g}_{tx,a}=max(0,min(1,A^{f64,g}_{tx,a}/6+1/2));];"
)

EXPAND_FACTORIZATION_INPUT = (
    "B^{7}_{tx=0}L^{3545}_{a=0}"
    "[G^{f16,g}_{tx}=G^{f16,g}_{tx}+(A^{f16,g}_{tx,a}-D^{f16,g}_{tx,a})**2;];"
)
EXPAND_FACTORIZATION_OUTPUT = (
    "B^{7}_{tx=0}L^{3545}_{a=0}"
    "[G^{f16,g}_{tx}=G^{f16,g}_{tx}+A^{f16,g}_{tx,a}**2"
    "-2*A^{f16,g}_{tx,a}*D^{f16,g}_{tx,a}+D^{f16,g}_{tx,a}**2;];"
)

CANCELLATION_INPUT = (
    "B^{128}_{tx=0}L^{16}_{a=0}L^{30}_{c=0}L^{30}_{d=0}"
    "[D^{f64,g}_{tx,a,c,d}=H^{f64,g}_{a}*((C^{f64,g}_{tx,a,c,d}-K^{f64,g}_{tx,a})"
    "/sqrt(N^{f64,g}_{tx,a}+1e-05))+I^{f64,g}_{a};];"
)
CANCELLATION_OUTPUT = (
    "B^{128}_{tx=0}L^{16}_{a=0}L^{30}_{c=0}L^{30}_{d=0}"
    "[D^{f64,g}_{tx,a,c,d}=(C^{f64,g}_{tx,a,c,d}*H^{f64,g}_{a}"
    "-H^{f64,g}_{a}*K^{f64,g}_{tx,a}+I^{f64,g}_{a}*sqrt(N^{f64,g}_{tx,a}+1.0e-5))"
    "/sqrt(N^{f64,g}_{tx,a}+1.0e-5);];"
)

EXPAND_CANCELLATION_INPUT = (
    "B^{527}_{tx=0}L^{11316}_{a=0}"
    "[J^{f64,g}_{tx,a}=1*(C^{f64,g}_{tx,a}*K^{f64,g}_{tx,a}"
    "+C^{f64,g}_{tx,a}*M^{f64,g}_{tx,a})/M^{f64,g}_{tx,a};];"
)
EXPAND_CANCELLATION_OUTPUT = (
    "B^{527}_{tx=0}L^{11316}_{a=0}"
    "[J^{f64,g}_{tx,a}=C^{f64,g}_{tx,a}*(1.0+(K^{f64,g}_{tx,a}/M^{f64,g}_{tx,a}));];"
)

APART_INPUT = (
    "B^{339}_{tx=0}L^{1659}_{a=0}"
    "[I^{f16,g}_{tx,a}=(K^{f16,g}_{tx,a}+M^{f16,g}_{tx,a})/M^{f16,g}_{tx,a};];"
)
APART_OUTPUT = (
    "B^{339}_{tx=0}L^{1659}_{a=0}"
    "[I^{f16,g}_{tx,a}=1.0+(K^{f16,g}_{tx,a}/M^{f16,g}_{tx,a});];"
)

TOGETHER_INPUT = (
    "B^{21}_{tx=0}L^{9036}_{a=0}L^{886}_{c=0}L^{9}_{d=0}"
    "[C^{f32,g}_{tx,a,c,d}=D^{f32,g}_{a}*((A^{f32,g}_{tx,a,c,d}-G^{f32,g}_{tx,a})"
    "/sqrt(I^{f32,g}_{tx,a}+1e-05))+E^{f32,g}_{a};];"
)
TOGETHER_OUTPUT = (
    "B^{21}_{tx=0}L^{9036}_{a=0}L^{886}_{c=0}L^{9}_{d=0}"
    "[C^{f32,g}_{tx,a,c,d}=(D^{f32,g}_{a}*(A^{f32,g}_{tx,a,c,d}-G^{f32,g}_{tx,a})"
    "+E^{f32,g}_{a}*sqrt(I^{f32,g}_{tx,a}+1.0e-5))/sqrt(I^{f32,g}_{tx,a}+1.0e-5);];"
)

POWSIMP_INPUT = (
    "B^{174}_{tx=0}L^{3662}_{a=0}"
    "[D^{f32,g}_{tx,a}=A^{f32,g}_{tx,a}*(1/(1+exp(-A^{f32,g}_{tx,a})));];"
)
POWSIMP_OUTPUT = (
    "B^{174}_{tx=0}L^{3662}_{a=0}"
    "[D^{f32,g}_{tx,a}=A^{f32,g}_{tx,a}/(1+exp(-A^{f32,g}_{tx,a}));];"
)

EXPAND_POWSIMP_INPUT = (
    "B^{693}_{tx=0}L^{14522}_{a=0}"
    "[D^{f16,g}_{tx,a}=A^{f16,g}_{tx,a}/(1+exp(-A^{f16,g}_{tx,a}));];"
)
EXPAND_POWSIMP_OUTPUT = (
    "B^{693}_{tx=0}L^{14522}_{a=0}"
    "[D^{f16,g}_{tx,a}=A^{f16,g}_{tx,a}*(1/(1+exp(-A^{f16,g}_{tx,a})));];"
)

LOGSIMP_INPUT = (
    "B^{65}_{tx=0}L^{883}_{a=0}L^{2399}_{c=0}"
    "[F^{f16,g}_{tx,a,c}=log(A^{f16,g}_{tx,a,c}*C^{f16,g}_{tx,a,c});];"
)
LOGSIMP_OUTPUT = (
    "B^{65}_{tx=0}L^{883}_{a=0}L^{2399}_{c=0}"
    "[F^{f16,g}_{tx,a,c}=log(A^{f16,g}_{tx,a,c})+log(C^{f16,g}_{tx,a,c});];"
)

EXPAND_LOG_INPUT = (
    "B^{500}_{tx=0}L^{644}_{a=0}L^{3730}_{c=0}"
    "[F^{f32,g}_{tx,a,c}=log(A^{f32,g}_{tx,a,c})+log(C^{f32,g}_{tx,a,c});];"
)
EXPAND_LOG_OUTPUT = (
    "B^{500}_{tx=0}L^{644}_{a=0}L^{3730}_{c=0}"
    "[F^{f32,g}_{tx,a,c}=log(A^{f32,g}_{tx,a,c}*C^{f32,g}_{tx,a,c});];"
)

COLLECT_INPUT = (
    "B^{264}_{tx=0}L^{114}_{a=0}"
    "[C^{f32,g}_{tx,a}=1.0507010221481323*(max(0,A^{f32,g}_{tx,a})"
    "+min(0,1.6732631921768188*(exp(A^{f32,g}_{tx,a})-1)));];"
)
COLLECT_OUTPUT = (
    "B^{264}_{tx=0}L^{114}_{a=0}"
    "[C^{f32,g}_{tx,a}=1.0507010221481323*max(0,A^{f32,g}_{tx,a})"
    "+1.0507010221481323*min(0,1.6732631921768188*(exp(A^{f32,g}_{tx,a})-1*1));];"
)

EXPAND_COLLECT_INPUT = (
    "B^{958}_{tx=0}L^{1289}_{a=0}"
    "[F^{f32,g}_{tx,a}=0.5*C^{f32,g}_{tx,a}/(1+exp(-C^{f32,g}_{tx,a}));];"
)
EXPAND_COLLECT_OUTPUT = (
    "B^{958}_{tx=0}L^{1289}_{a=0}"
    "[F^{f32,g}_{tx,a}=(C^{f32,g}_{tx,a}*(1/(1+exp(-C^{f32,g}_{tx,a}))))/2.0;];"
)

PETC_INPUT = (
    "B^{274}_{tx=0}L^{555}_{a=0}L^{1353}_{c=0}L^{417}_{d=0}L^{3}_{f=0}"
    "[D^{f16,g}_{tx,a,c}=D^{f16,g}_{tx,a,c}+H^{f16,g}_{tx,d,c*5+f*6}*G^{f16,g}_{a,d,f};];"
    "B^{274}_{tx=0}L^{555}_{a=0}L^{1353}_{c=0}L^{417}_{d=0}L^{3}_{f=0}"
    "[E^{f16,g}_{tx,a,c}=E^{f16,g}_{tx,a,c}+I^{f16,g}_{tx,d,c*5+f*6}*G^{f16,g}_{a,d,f};];"
)
PETC_REFERENCE_PARTS = (
    "B^{274}_{tx=0}L^{417}_{a=0}L^{6759}_{c=0}"
    "[J^{f16,g}_{tx,a,c}=A^{f16,g}_{tx,a,c};J^{f16,g}_{tx,a,c+6759}=C^{f16,g}_{tx,a,c};];"
    "B^{274}_{tx=0}L^{417}_{a=0}L^{13534}_{c=0}"
    "[K^{f16,g}_{tx,a,c}=if_then_else(8<=c<13526,J^{f16,g}_{tx,a,c-8},0);];"
    "B^{274}_{tx=0}L^{555}_{a=0}L^{13532}_{c=0}L^{417}_{d=0}L^{3}_{f=0}"
    "[M^{f16,g}_{tx,a,c}=M^{f16,g}_{tx,a,c}+K^{f16,g}_{tx,d,c*5+f*6}*G^{f16,g}_{a,d,f};];"
    "B^{274}_{tx=0}L^{555}_{a=0}L^{1353}_{c=0}"
    "[D^{f16,g}_{tx,a,c}=M^{f16,g}_{tx,a,c};E^{f16,g}_{tx,a,c}=M^{f16,g}_{tx,a,c+12179};];"
    "B^{274}_{tx=0}L^{555}_{a=0}L^{2}_{c=0}[D^{f16,g}_{tx,a,c+1351}=0;]"
    "L^{417}_{d=0}L^{3}_{f=0}[D^{f16,g}_{tx,a,c+1351}=D^{f16,g}_{tx,a,c+1351}"
    "+H^{f16,g}_{tx,d,(c+1351)+f*6}*G^{f16,g}_{a,d,f};];"
    "B^{274}_{tx=0}L^{555}_{a=0}L^{2}_{c=0}[E^{f16,g}_{tx,a,1-c}=0;]"
    "L^{417}_{d=0}L^{3}_{f=0}[E^{f16,g}_{tx,a,1-c}=E^{f16,g}_{tx,a,1-c}"
    "+I^{f16,g}_{tx,d,(1-c)+f*6}*G^{f16,g}_{a,d,f};];"
)

EXP_SPLIT_INPUT = (
    "B^{294}_{tx=0}L^{32193}_{a=0}"
    "[C^{f16,g}_{tx,a}=1/(1+exp(-A^{f16,g}_{tx,a}));];"
)
EXP_SPLIT_OUTPUT = (
    "B^{294}_{tx=0}L^{32193}_{a=0}"
    "[C^{f16,g}_{tx,a}=1/(1+exp(-A^{f16,g}_{tx,a}"
    "-if_then_else(a-1<0,0,A^{f16,g}_{tx,a-1}))"
    "*exp(if_then_else(a-1<0,0,A^{f16,g}_{tx,a-1})));];"
)

MULT_SPLIT_INPUT = (
    "B^{445}_{tx=0}L^{1}_{a=0}L^{424}_{c=0}L^{207}_{d=0}"
    "[F^{f16,g}_{tx,a,c,d}=K^{f16,g}_{tx,a,c,d}/M^{f16,g}_{tx,a,c,d};];"
)
MULT_SPLIT_REFERENCE = (
    "B^{445}_{tx=0}L^{1}_{a=0}L^{424}_{c=0}L^{207}_{d=0}"
    "[F^{f16,g}_{tx,a,c,d}=(K^{f16,g}_{tx,a,c,d}/E^{f16,g}_{tx,a,c,d}"
    "*E^{f16,g}_{tx,a,c,d})/M^{f16,g}_{tx,a,c,d};];"
)

ADD_SPLIT_INPUT = (
    "B^{466}_{tx=0}L^{1}_{a=0}L^{1}_{c=0}L^{2}_{d=0}"
    "[J^{f32,g}_{tx,a,c,d}=I^{f32,g}_{tx,a,c,d}+M^{f32,g}_{0,a,c,d};];"
)
ADD_SPLIT_REFERENCE = (
    "B^{466}_{tx=0}L^{1}_{a=0}L^{1}_{c=0}L^{2}_{d=0}"
    "[J^{f32,g}_{tx,a,c,d}=I^{f32,g}_{tx,a,c,d}+I^{f32,g}_{tx,a,c,d}"
    "-I^{f32,g}_{tx,a,c,d}+M^{f32,g}_{0,a,c,d};];"
)

PREFIX_MAX_INPUT = (
    "B^{156}_{tx=0}L^{8}_{a=0}L^{274}_{c=0}L^{274}_{d=0}"
    "[Am^{f16,g}_{tx,a,c}=max(Am^{f16,g}_{tx,a,c},Y^{f16,g}_{tx,a,c,d});];"
    "B^{156}_{tx=0}L^{8}_{a=0}L^{274}_{c=0}L^{274}_{d=0}"
    "[An^{f16,g}_{tx,a,c}=An^{f16,g}_{tx,a,c}+exp(Y^{f16,g}_{tx,a,c,d}-Am^{f16,g}_{tx,a,c});];"
)
PREFIX_MAX_REFERENCE = (
    "B^{156}_{tx=0}L^{8}_{a=0}L^{274}_{c=0}L^{274}_{d=0}"
    "[Am^{f16,g}_{tx,a,c,d}=max(if_then_else(d-1<0,-inf,Am^{f16,g}_{tx,a,c,d-1}),Y^{f16,g}_{tx,a,c,d});"
    "Ao^{f16,g}_{tx,a,c,d}=if_then_else(d-1<0,1,Ao^{f16,g}_{tx,a,c,d-1})"
    "*exp(if_then_else(d-1<0,-inf,Am^{f16,g}_{tx,a,c,d-1})-Am^{f16,g}_{tx,a,c,d})"
    "+exp(Y^{f16,g}_{tx,a,c,d}-Am^{f16,g}_{tx,a,c,d});];"
    "B^{156}_{tx=0}L^{8}_{a=0}L^{274}_{c=0}[An^{f16,g}_{tx,a,c}=Ao^{f16,g}_{tx,a,c,273};];"
)

PREFIX_EXPSUM_INPUT = (
    "B^{933}_{tx=0}L^{1}_{a=0}[I^{f16,g}_{tx}=max(I^{f16,g}_{tx},D^{f16,g}_{tx,a});];"
)
PREFIX_EXPSUM_REFERENCE = (
    "B^{933}_{tx=0}L^{1}_{a=0}"
    "[K^{f16,g}_{tx,a}=max(if_then_else(a-1<0,-inf,K^{f16,g}_{tx,a-1}),D^{f16,g}_{tx,a});];"
    "B^{933}_{tx=0}[I^{f16,g}_{tx}=K^{f16,g}_{tx,0};];"
)

ONLINE_SOFTMAX_INPUT = (
    "B^{186}_{tx=0}L^{1}_{a=0}[I^{f16,g}_{tx}=max(I^{f16,g}_{tx},D^{f16,g}_{tx,a});];"
    "B^{186}_{tx=0}L^{1}_{a=0}[J^{f16,g}_{tx}=J^{f16,g}_{tx}+exp(D^{f16,g}_{tx,a}-I^{f16,g}_{tx});];"
    "B^{186}_{tx=0}L^{1}_{a=0}[E^{f16,g}_{tx,a}=exp(D^{f16,g}_{tx,a}-I^{f16,g}_{tx})/J^{f16,g}_{tx};];"
)
ONLINE_SOFTMAX_REFERENCE = (
    "B^{186}_{tx=0}L^{1}_{a=0}"
    "[I^{f16,g}_{tx,a}=max(if_then_else(a-1<0,-inf,I^{f16,g}_{tx,a-1}),D^{f16,g}_{tx,a});"
    "K^{f16,g}_{tx,a}=if_then_else(a-1<0,1,K^{f16,g}_{tx,a-1})"
    "*exp(if_then_else(a-1<0,-inf,I^{f16,g}_{tx,a-1})-I^{f16,g}_{tx,a})"
    "+exp(D^{f16,g}_{tx,a}-I^{f16,g}_{tx,a});];"
    "B^{186}_{tx=0}L^{1}_{a=0}"
    "[E^{f16,g}_{tx,a}=exp(D^{f16,g}_{tx,a}-I^{f16,g}_{tx,0})/K^{f16,g}_{tx,0};];"
)

FLASH_INPUT = (
    "B^{29}_{tx=0}L^{2}_{a=0}L^{3}_{c=0}L^{3}_{d=0}"
    "[Ax^{f64,g}_{tx,a,c}=max(Ax^{f64,g}_{tx,a,c},Ac^{f64,g}_{tx,a,c,d});];"
    "B^{29}_{tx=0}L^{2}_{a=0}L^{3}_{c=0}L^{3}_{d=0}"
    "[Ay^{f64,g}_{tx,a,c}=Ay^{f64,g}_{tx,a,c}+exp(Ac^{f64,g}_{tx,a,c,d}-Ax^{f64,g}_{tx,a,c});];"
    "B^{29}_{tx=0}L^{2}_{a=0}L^{3}_{c=0}L^{3}_{d=0}"
    "[Ad^{f64,g}_{tx,a,c,d}=exp(Ac^{f64,g}_{tx,a,c,d}-Ax^{f64,g}_{tx,a,c})/Ay^{f64,g}_{tx,a,c};];"
    "B^{29}_{tx=0}L^{2}_{a=0}L^{3}_{c=0}L^{139}_{d=0}L^{3}_{f=0}"
    "[Ae^{f64,g}_{tx,a,c,d}=Ae^{f64,g}_{tx,a,c,d}+Ad^{f64,g}_{tx,a,c,f}*X^{f64,g}_{tx,a,f,d};];"
)
FLASH_REFERENCE = (
    "B^{29}_{tx=0}L^{2}_{a=0}L^{3}_{c=0}L^{3}_{d=0}"
    "[Ax^{f64,l}_{tx,a,c,d}=max(if_then_else(d-1<0,-inf,Ax^{f64,l}_{tx,a,c,d-1}),Ac^{f64,g}_{tx,a,c,d});"
    "Az^{f64,l}_{tx,a,c,d}=if_then_else(d-1<0,1,Az^{f64,l}_{tx,a,c,d-1})"
    "*exp(if_then_else(d-1<0,-inf,Ax^{f64,l}_{tx,a,c,d-1})-Ax^{f64,l}_{tx,a,c,d})"
    "+exp(Ac^{f64,g}_{tx,a,c,d}-Ax^{f64,l}_{tx,a,c,d});"
    "L^{139}_{i=0}[Ca^{f64,g}_{tx,a,c,i,d}=if_then_else(d-1<0,1,Ca^{f64,g}_{tx,a,c,i,d-1})"
    "*if_then_else(d-1<0,1,Az^{f64,l}_{tx,a,c,d-1})"
    "*exp(if_then_else(d-1<0,-inf,Ax^{f64,l}_{tx,a,c,d-1})-Ax^{f64,l}_{tx,a,c,d})/Az^{f64,l}_{tx,a,c,d}"
    "+exp(Ac^{f64,g}_{tx,a,c,d}-Ax^{f64,l}_{tx,a,c,d})/Az^{f64,l}_{tx,a,c,d}*X^{f64,g}_{tx,a,d,i};];];"
    "B^{29}_{tx=0}L^{139}_{d=0}L^{2}_{a=0}L^{3}_{c=0}"
    "[Ae^{f64,g}_{tx,a,c,d}=Ca^{f64,g}_{tx,a,c,d,2};];"
)

PREFIX_MATMUL_INPUT = (
    "B^{110}_{tx=0}L^{8}_{a=0}L^{2}_{c=0}L^{2}_{d=0}"
    "[As^{f32,g}_{tx,a,c,d}=max(if_then_else(d-1<0,-inf,As^{f32,g}_{tx,a,c,d-1}),Y^{f32,g}_{tx,a,c,d});"
    "Cc^{f32,g}_{tx,a,c,d}=if_then_else(d-1<0,1,Cc^{f32,g}_{tx,a,c,d-1})"
    "*exp(if_then_else(d-1<0,-inf,As^{f32,g}_{tx,a,c,d-1})-As^{f32,g}_{tx,a,c,d})"
    "+exp(Y^{f32,g}_{tx,a,c,d}-As^{f32,g}_{tx,a,c,d});];"
    "B^{110}_{tx=0}L^{8}_{a=0}L^{2}_{c=0}L^{2}_{d=0}"
    "[Z^{f32,g}_{tx,a,c,d}=exp(Y^{f32,g}_{tx,a,c,d}-As^{f32,g}_{tx,a,c,1})/Cc^{f32,g}_{tx,a,c,1};];"
    "B^{110}_{tx=0}L^{8}_{a=0}L^{2}_{c=0}L^{50}_{d=0}L^{2}_{f=0}"
    "[Aa^{f32,g}_{tx,a,c,d}=Aa^{f32,g}_{tx,a,c,d}+Z^{f32,g}_{tx,a,c,f}*N^{f32,g}_{tx,a,f,d};];"
)
PREFIX_MATMUL_REFERENCE = (
    "B^{110}_{tx=0}L^{8}_{a=0}L^{2}_{c=0}L^{2}_{d=0}"
    "[As^{f32,l}_{tx,a,c,d}=max(if_then_else(d-1<0,-inf,As^{f32,l}_{tx,a,c,d-1}),Y^{f32,g}_{tx,a,c,d});"
    "Cc^{f32,l}_{tx,a,c,d}=if_then_else(d-1<0,1,Cc^{f32,l}_{tx,a,c,d-1})"
    "*exp(if_then_else(d-1<0,-inf,As^{f32,l}_{tx,a,c,d-1})-As^{f32,l}_{tx,a,c,d})"
    "+exp(Y^{f32,g}_{tx,a,c,d}-As^{f32,l}_{tx,a,c,d});"
    "L^{50}_{i=0}[Cd^{f32,g}_{tx,a,c,i,d}=if_then_else(d-1<0,1,Cd^{f32,g}_{tx,a,c,i,d-1})"
    "*if_then_else(d-1<0,1,Cc^{f32,l}_{tx,a,c,d-1})"
    "*exp(if_then_else(d-1<0,-inf,As^{f32,l}_{tx,a,c,d-1})-As^{f32,l}_{tx,a,c,d})/Cc^{f32,l}_{tx,a,c,d}"
    "+exp(Y^{f32,g}_{tx,a,c,d}-As^{f32,l}_{tx,a,c,d})/Cc^{f32,l}_{tx,a,c,d}*N^{f32,g}_{tx,a,d,i};];];"
    "B^{110}_{tx=0}L^{50}_{d=0}L^{2}_{c=0}L^{8}_{a=0}"
    "[Aa^{f32,g}_{tx,a,c,d}=Cd^{f32,g}_{tx,a,c,d,1};];"
)

# every reference string, for the grammar round-trip suite
REFERENCE_TEXTS: dict[str, str] = {
    "fig_matmul": FIG_MATMUL,
    "bias_add": BIAS_ADD,
    "two_nests": TWO_NESTS,
    "pipeline_residual": PIPELINE_RESIDUAL,
    "pipeline_residual_optimized": PIPELINE_RESIDUAL_OPTIMIZED,
    "pipeline_gemm_swish": PIPELINE_GEMM_SWISH,
    "fusion_input": FUSION_INPUT,
    "fusion_output": FUSION_OUTPUT,
    "fission_input": FISSION_INPUT,
    "fission_output": FISSION_OUTPUT,
    "inline_input": INLINE_INPUT,
    "inline_output": INLINE_OUTPUT,
    "expr_split_input": EXPR_SPLIT_INPUT,
    "expr_split_output": EXPR_SPLIT_OUTPUT,
    "concat_fuse_input": CONCAT_FUSE_INPUT,
    "concat_fuse_output": CONCAT_FUSE_OUTPUT,
    "split_decouple_input": SPLIT_DECOUPLE_INPUT,
    "split_decouple_output": SPLIT_DECOUPLE_OUTPUT,
    "cse_input": CSE_INPUT,
    "cse_output": CSE_OUTPUT,
    "reorder_input": REORDER_INPUT,
    "loop_reorder_input": LOOP_REORDER_INPUT,
    "loop_reorder_output": LOOP_REORDER_OUTPUT,
    "loop_tiling_input": LOOP_TILING_INPUT,
    "loop_tiling_output": LOOP_TILING_OUTPUT,
    "loop_split_input": LOOP_SPLIT_INPUT,
    "loop_split_output": LOOP_SPLIT_OUTPUT,
    "loop_fusion_input": LOOP_FUSION_INPUT,
    "loop_fusion_output": LOOP_FUSION_OUTPUT,
    "unroll_input": UNROLL_INPUT,
    "parallelize_input": PARALLELIZE_INPUT,
    "vectorize_input": VECTORIZE_INPUT,
    "binding_input": BINDING_INPUT,
    "binding_output": BINDING_OUTPUT,
    "reduction_factor_input": REDUCTION_FACTOR_INPUT,
    "reduction_factor_parts": REDUCTION_FACTOR_PARTS,
    "cache_rw_input": CACHE_RW_INPUT,
    "cache_rw_parts": CACHE_RW_PARTS,
    "layout_input": LAYOUT_INPUT,
    "layout_copy": LAYOUT_COPY,
    "set_scope_input": SET_SCOPE_INPUT,
    "set_layout_input": SET_LAYOUT_INPUT,
    "precompute_input": PRECOMPUTE_INPUT,
    "precompute_copy": PRECOMPUTE_COPY,
    "factorization_input": FACTORIZATION_INPUT,
    "factorization_output": FACTORIZATION_OUTPUT,
    "expand_factorization_input": EXPAND_FACTORIZATION_INPUT,
    "expand_factorization_output": EXPAND_FACTORIZATION_OUTPUT,
    "cancellation_input": CANCELLATION_INPUT,
    "cancellation_output": CANCELLATION_OUTPUT,
    "expand_cancellation_input": EXPAND_CANCELLATION_INPUT,
    "expand_cancellation_output": EXPAND_CANCELLATION_OUTPUT,
    "apart_input": APART_INPUT,
    "apart_output": APART_OUTPUT,
    "together_input": TOGETHER_INPUT,
    "together_output": TOGETHER_OUTPUT,
    "powsimp_input": POWSIMP_INPUT,
    "powsimp_output": POWSIMP_OUTPUT,
    "expand_powsimp_input": EXPAND_POWSIMP_INPUT,
    "expand_powsimp_output": EXPAND_POWSIMP_OUTPUT,
    "logsimp_input": LOGSIMP_INPUT,
    "logsimp_output": LOGSIMP_OUTPUT,
    "expand_log_input": EXPAND_LOG_INPUT,
    "expand_log_output": EXPAND_LOG_OUTPUT,
    "collect_input": COLLECT_INPUT,
    "collect_output": COLLECT_OUTPUT,
    "expand_collect_input": EXPAND_COLLECT_INPUT,
    "expand_collect_output": EXPAND_COLLECT_OUTPUT,
    "petc_input": PETC_INPUT,
    "petc_reference_parts": PETC_REFERENCE_PARTS,
    "exp_split_input": EXP_SPLIT_INPUT,
    "exp_split_output": EXP_SPLIT_OUTPUT,
    "mult_split_input": MULT_SPLIT_INPUT,
    "mult_split_reference": MULT_SPLIT_REFERENCE,
    "add_split_input": ADD_SPLIT_INPUT,
    "add_split_reference": ADD_SPLIT_REFERENCE,
    "prefix_max_input": PREFIX_MAX_INPUT,
    "prefix_max_reference": PREFIX_MAX_REFERENCE,
    "prefix_expsum_input": PREFIX_EXPSUM_INPUT,
    "prefix_expsum_reference": PREFIX_EXPSUM_REFERENCE,
    "online_softmax_input": ONLINE_SOFTMAX_INPUT,
    "online_softmax_reference": ONLINE_SOFTMAX_REFERENCE,
    "flash_input": FLASH_INPUT,
    "flash_reference": FLASH_REFERENCE,
    "prefix_matmul_input": PREFIX_MATMUL_INPUT,
    "prefix_matmul_reference": PREFIX_MATMUL_REFERENCE,
}

# per-strategy worked-example input program
STRATEGY_EXAMPLE_INPUTS: dict[str, str] = {
    "operator fusion": FUSION_INPUT,
    "operator fission": FISSION_INPUT,
    "compute inline": INLINE_INPUT,
    "expression splitting": EXPR_SPLIT_INPUT,
    "tensor concat to fuse operators": CONCAT_FUSE_INPUT,
    "tensor split to decouple operators": SPLIT_DECOUPLE_INPUT,
    "common subexpression elimination": CSE_INPUT,
    "expression reorder": REORDER_INPUT,
    "loop reorder": LOOP_REORDER_INPUT,
    "loop tiling": LOOP_TILING_INPUT,
    "loop split": LOOP_SPLIT_INPUT,
    "loop fusion": LOOP_FUSION_INPUT,
    "loop unrolling": UNROLL_INPUT,
    "loop parallelization": PARALLELIZE_INPUT,
    "loop vectorization": VECTORIZE_INPUT,
    "loop binding": BINDING_INPUT,
    "reduction factorization": REDUCTION_FACTOR_INPUT,
    "cache read write": CACHE_RW_INPUT,
    "layout transformation": LAYOUT_INPUT,
    "set storage scope": SET_SCOPE_INPUT,
    "set storage layout": SET_LAYOUT_INPUT,
    "precompute indices": PRECOMPUTE_INPUT,
    "factorization": FACTORIZATION_INPUT,
    "expand factorization": EXPAND_FACTORIZATION_INPUT,
    "cancellation": CANCELLATION_INPUT,
    "expand cancellation": EXPAND_CANCELLATION_INPUT,
    "apart": APART_INPUT,
    "together": TOGETHER_INPUT,
    "powsimp": POWSIMP_INPUT,
    "expand powsimp": EXPAND_POWSIMP_INPUT,
    "logsimp": LOGSIMP_INPUT,
    "expand log": EXPAND_LOG_INPUT,
    "collect": COLLECT_INPUT,
    "expand collect": EXPAND_COLLECT_INPUT,
    "partially equivalent then correct": PETC_INPUT,
    "exponential split": EXP_SPLIT_INPUT,
    "multiplicative split": MULT_SPLIT_INPUT,
    "additive split": ADD_SPLIT_INPUT,
    "normal loop max to prefix max": PREFIX_MAX_INPUT,
    "normal loop summation on exp to prefix summation on exp": PREFIX_EXPSUM_INPUT,
    "online softmax": ONLINE_SOFTMAX_INPUT,
    "flashattention wo tiling": FLASH_INPUT,
    "normal matmul to prefix matmul based on online softmax": PREFIX_MATMUL_INPUT,
}
