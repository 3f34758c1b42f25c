import pandas as pd
import plotly.graph_objects as go
import streamlit as st

from evidence_tools import codec, corpus
from evidence_tools.cases import bpa_from_cases, ingest_cases
from evidence_tools.conditionals import (
    Cover,
    Strategy,
    approximate_conditional,
    combine_with_marginal,
    is_cano_type,
    is_marginally_consistent,
    marginally_correct,
)
from evidence_tools.config import DEFAULT_LIMITS
from evidence_tools.errors import EvidenceError
from evidence_tools.feasibility import Method, cano_conditional_exists, decomposition_exists
from evidence_tools.mass import box_hull, focal_summary

STRATEGY_LABELS = {
    "貪欲法 (greedy)": Strategy.GREEDY,
    "全探索 (exhaustive)": Strategy.EXHAUSTIVE,
    "確率的 (stochastic)": Strategy.STOCHASTIC,
}
COVER_LABELS = {
    "和集合 (union)": Cover.UNION,
    "縮小 (tight, 条件付けには使えない比較用)": Cover.TIGHT,
}


# --- 計算ロジック関数 ---
def read_upload(uploaded):
    text = uploaded.getvalue().decode("utf-8")
    if text.lstrip().startswith("{"):
        return codec.load_mass(text)
    return bpa_from_cases(ingest_cases(text))


def trace_frame(result):
    rows = []
    running = 0
    for n, it in enumerate(result.trace.iterations, start=1):
        running += it.contribution
        rows.append({
            "反復": n,
            "gMin": str(it.g_min),
            "焦点要素": it.focal.describe(),
            "q 寄与": str(it.contribution),
            "q 累積": str(running),
            "q 累積 (小数)": float(running),
            "厳密": "✅" if it.is_exact else "-",
        })
    return pd.DataFrame(rows)


def quality_chart(trace):
    fig = go.Figure()
    fig.add_trace(go.Bar(
        x=trace["反復"], y=trace["q 累積 (小数)"],
        name="q 累積", marker_color=["#99FF99" if e == "✅" else "#FF9999" for e in trace["厳密"]],
        text=trace["q 累積"], textposition="auto"
    ))
    fig.add_hline(y=1.0, line_dash="dash", line_color="green", annotation_text="q = 1")
    fig.update_layout(
        xaxis=dict(title="反復", dtick=1),
        yaxis=dict(title="品質 q", range=[0, 1.1]),
        height=320,
        margin=dict(l=20, r=20, t=30, b=10),
    )
    return fig


def show_error(exc):
    st.error(f"**{type(exc).__name__}**: {exc}")


# --- UI構築 ---
st.set_page_config(page_title="Conditional Lab", layout="wide")

st.markdown("""
    <style>
    @media (max-width: 600px) {
        h1 { font-size: 1.6rem !important; padding-bottom: 0.5rem !important; }
        h2 { font-size: 1.4rem !important; padding-top: 0.5rem !important; }
        h3 { font-size: 1.2rem !important; }
    }
    </style>
    """, unsafe_allow_html=True)

st.title("🔀 Cano 型条件付き信念関数ラボ")
st.markdown("同時 bpa と条件変数 p を選び、p を条件とする条件付き信念関数を近似構成します。")

# --- サイドバー: 入力 ---
st.sidebar.header("1. 同時 bpa")
instances = corpus.conditioning_corpus()
name = st.sidebar.selectbox("同梱インスタンス", sorted(instances))
uploaded = st.sidebar.file_uploader("CSV / mass JSON (任意)", type=["csv", "json"])

if uploaded is not None:
    try:
        m = read_upload(uploaded)
    except EvidenceError as exc:
        show_error(exc)
        st.stop()
    default_given = m.frame.names[:1]
else:
    m, default_given = instances[name]

given = st.sidebar.multiselect("条件変数 p", m.frame.names, default=list(default_given))
hull = st.sidebar.checkbox("箱でない焦点要素を箱包で置き換える", value=False)

st.sidebar.markdown("---")
st.sidebar.header("2. 探索戦略")
strategy = STRATEGY_LABELS[st.sidebar.radio("戦略", list(STRATEGY_LABELS))]
seed = None
if strategy is Strategy.STOCHASTIC:
    seed = int(st.sidebar.number_input("乱数シード", min_value=0, value=0, step=1))
with st.sidebar.expander("詳細設定 (探索上限)", expanded=False):
    budget = st.number_input("全探索の上限ノード数", min_value=1, value=DEFAULT_LIMITS.search_budget, step=1000)
    restarts = st.number_input("確率的探索の試行回数", min_value=1, value=DEFAULT_LIMITS.stochastic_restarts)
    cover = COVER_LABELS[st.radio("被覆", list(COVER_LABELS))]
limits = DEFAULT_LIMITS.override(search_budget=int(budget), stochastic_restarts=int(restarts))

if hull:
    m = box_hull(m)

with st.expander("入力 bpa を見る", expanded=False):
    st.dataframe(focal_summary(m).drop(columns="decimal"), hide_index=True, use_container_width=True)

if not given or len(given) == len(m.frame.names):
    st.warning("条件変数 p は空でなく、全変数より少なく選んでください")
    st.stop()

# ==========================================
# 1. 近似構成
# ==========================================
st.header("1. 近似構成")
try:
    result = approximate_conditional(m, given, strategy, seed, cover=cover, limits=limits)
except EvidenceError as exc:
    show_error(exc)
    st.stop()

combined = combine_with_marginal(m, given, result.conditional)
consistent = is_marginally_consistent(m, given, result.conditional)

col_q, col_c, col_k = st.columns(3)
col_q.metric("品質 q", str(result.quality), f"{float(result.quality):.4f}", delta_color="off")
col_c.metric("周辺整合", "はい" if consistent else "いいえ")
col_k.metric("周辺の正しさ", "はい" if marginally_correct(m, combined) else "いいえ")
if result.quality < 1:
    st.warning("⚠️ q < 1: 組み合わせた結果の周辺は元の周辺より粗くなります（正しさは保たれます）")

col_cond, col_trace = st.columns(2)
with col_cond:
    st.info("##### 条件付き信念関数")
    st.dataframe(focal_summary(result.conditional).drop(columns=["Q", "decimal"]), hide_index=True)
    st.caption(f"Cano 型: {'✅' if is_cano_type(result.conditional, given) else '❌'}")
with col_trace:
    st.success("##### 反復の記録")
    trace = trace_frame(result)
    st.dataframe(trace.drop(columns="q 累積 (小数)"), hide_index=True)

st.plotly_chart(quality_chart(trace), use_container_width=True)

with st.expander("JSON 出力"):
    st.json(codec.approximation_to_json(result))

# ==========================================
# 2. 存在判定
# ==========================================
st.divider()
st.header("2. 存在判定")
st.markdown("候補集合の質量を未知数とする線形系を有理数で厳密に解きます。")
method = Method(st.radio("解法", [k.value for k in Method], horizontal=True))

if st.button("判定を実行", type="primary"):
    col_cano, col_dec = st.columns(2)
    with col_cano:
        st.info("##### 周辺整合な Cano 型条件付き信念関数")
        try:
            cert = cano_conditional_exists(m, given, method, limits=limits)
            st.metric("判定", cert.verdict.value, f"候補 {cert.candidates}", delta_color="off")
            if cert.witness is not None:
                st.dataframe(focal_summary(cert.witness).drop(columns=["Q", "decimal"]), hide_index=True)
        except EvidenceError as exc:
            show_error(exc)
    with col_dec:
        st.success("##### 厳密な分解 m = m↓p ⊕ 条件付き")
        try:
            cert = decomposition_exists(m, given, method, limits=limits)
            st.metric("判定", cert.verdict.value, f"候補 {cert.candidates}", delta_color="off")
            if cert.witness is not None:
                st.dataframe(focal_summary(cert.witness).drop(columns=["Q", "decimal"]), hide_index=True)
        except EvidenceError as exc:
            show_error(exc)

# --- 計算根拠の表示 ---
st.markdown("---")
with st.expander("📚 計算の根拠 (クリックで展開)"):
    st.markdown("""
    * 各反復で、残差表の各行から1つの集合を選び、行ごとに残る値の被覆を作ります。
      被覆と条件変数の値の直積の和集合が、その反復の焦点要素になります。
    * 既定の被覆は、その値を含む行で選ばれた集合の和集合です。tight 被覆は q を高くできますが、他の変数での条件付けに使うと正しさが崩れます。
    * 反復の重み gMin は、選ばれた集合の残差の最小値です。
    * 品質 q は、各行で選んだ集合の大きさと被覆の和集合の大きさの比を、周辺の質量と gMin で重み付けした和です。
    * q = 1 のとき、そのときに限り結果は周辺整合になります。
    """)
