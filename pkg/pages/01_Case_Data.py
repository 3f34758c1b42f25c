from fractions import Fraction
from pathlib import Path

import pandas as pd
import plotly.graph_objects as go
import streamlit as st

from evidence_tools.cases import (
    bpa_from_cases,
    condition_by_cases,
    ingest_cases,
    naive_serial_condition,
    serial_condition,
)
from evidence_tools.errors import EvidenceError
from evidence_tools.mass import condition_shafer, focal_summary, pignistic

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
BUNDLED = {
    "Y テーブル (1変数・集合値)": "y_table.csv",
    "Bel_and (3変数)": "bel_and.csv",
    "40/60 (X, Z)": "forty_sixty.csv",
    "逐次条件付けの落とし穴": "serial_pitfall.csv",
}


# --- 計算ロジック関数 ---
def load_table(source, uploaded):
    if uploaded is not None:
        return ingest_cases(uploaded.getvalue().decode("utf-8"))
    return ingest_cases((DATA_DIR / BUNDLED[source]).read_text(encoding="utf-8"))


def betp_frame(m):
    betp = pignistic(m)
    return pd.DataFrame(
        {
            "configuration": [",".join(c) for c in betp],
            "BetP": [str(v) for v in betp.values()],
            "decimal": [float(v) for v in betp.values()],
        }
    )


def belief_chart(summary):
    fig = go.Figure()
    fig.add_trace(go.Bar(x=summary["focal"], y=summary["decimal"], name="m", marker_color="#9999FF"))
    fig.add_trace(go.Scatter(
        x=summary["focal"], y=[float(Fraction(v)) for v in summary["Bel"]],
        mode="lines+markers", name="Bel", line=dict(color="#0068c9", width=3)
    ))
    fig.add_trace(go.Scatter(
        x=summary["focal"], y=[float(Fraction(v)) for v in summary["Pl"]],
        mode="lines+markers", name="Pl", line=dict(color="red", width=3, dash="dash")
    ))
    fig.update_layout(
        yaxis=dict(range=[0, 1.05], title="値"),
        xaxis_title="焦点要素",
        height=380,
        margin=dict(l=20, r=20, t=30, b=10),
        legend=dict(orientation="h", y=1.1),
    )
    return fig


def show_error(exc):
    st.error(f"**{type(exc).__name__}**: {exc}")


# --- UI構築 ---
st.set_page_config(page_title="Case Data", layout="wide")

# --- CSS設定 (スマホ対応: タイトル文字サイズ調整) ---
st.markdown("""
    <style>
    @media (max-width: 600px) {
        h1 { font-size: 1.6rem !important; padding-bottom: 0.5rem !important; }
        h2 { font-size: 1.4rem !important; padding-top: 0.5rem !important; }
        h3 { font-size: 1.2rem !important; }
        p, .stMarkdown { font-size: 0.95rem !important; }
    }
    </style>
    """, unsafe_allow_html=True)

st.title("📋 事例データと条件付け")
st.markdown("集合値の事例表 (CSV) から bpa を作り、条件付けの3つの方法を比較します。")

# --- サイドバー: データ選択 ---
st.sidebar.header("1. 事例データ")
source = st.sidebar.selectbox("同梱データ", list(BUNDLED))
uploaded = st.sidebar.file_uploader("CSV をアップロード (任意)", type=["csv"])
st.sidebar.caption("セルは `x1|x2` のように `|` 区切りで集合値を書けます。`count` 列は任意です。")

try:
    table = load_table(source, uploaded)
except EvidenceError as exc:
    show_error(exc)
    st.stop()

# ==========================================
# 1. 事例表と bpa
# ==========================================
st.header("1. 事例表と bpa")
col_cases, col_bpa = st.columns(2)

with col_cases:
    st.dataframe(table.to_dataframe(), hide_index=True, use_container_width=True)
    st.metric("事例数 (count 合計)", table.total)

m = bpa_from_cases(table)
summary = focal_summary(m)
with col_bpa:
    st.dataframe(summary.drop(columns="decimal"), hide_index=True, use_container_width=True)

st.plotly_chart(belief_chart(summary), use_container_width=True)

with st.expander("ピグニスティック確率 BetP"):
    st.dataframe(betp_frame(m), hide_index=True, use_container_width=True)

# ==========================================
# 2. 単一条件での条件付け
# ==========================================
st.divider()
st.header("2. 条件付け")

col_var, col_vals = st.columns(2)
with col_var:
    var = st.selectbox("条件とする変数", table.frame.names)
domain = table.frame.variable(var).domain
with col_vals:
    values = st.multiselect("値の集合", domain, default=list(domain[:1]))

if not values:
    st.warning("値を1つ以上選んでください")
else:
    col_c, col_s = st.columns(2)
    by_cases = by_shafer = None
    with col_c:
        st.info("##### 事例の更新 (cases)")
        try:
            by_cases = condition_by_cases(table, var, values)
            st.dataframe(focal_summary(by_cases).drop(columns="decimal"), hide_index=True)
        except EvidenceError as exc:
            show_error(exc)
    with col_s:
        st.success("##### Dempster 則 (Shafer)")
        try:
            by_shafer = condition_shafer(m, var, values)
            st.dataframe(focal_summary(by_shafer).drop(columns="decimal"), hide_index=True)
        except EvidenceError as exc:
            show_error(exc)
    if by_cases is not None and by_shafer is not None:
        if by_cases == by_shafer:
            st.caption("✅ 2つの方法の結果は一致しています。")
        else:
            st.warning("⚠️ 2つの方法の結果が一致しません")

# ==========================================
# 3. 逐次条件付け
# ==========================================
st.divider()
st.header("3. 逐次条件付け")
st.markdown("条件を1行ずつ `変数=値|値` の形式で入力します。")

default_conditions = "X=x1|x2\nX=x2|x3" if "X" in table.frame.names else ""
text = st.text_area("条件リスト", value=default_conditions, height=100)
conditions = []
for line in filter(None, (s.strip() for s in text.splitlines())):
    name, _, rhs = line.partition("=")
    conditions.append((name.strip(), [v.strip() for v in rhs.split("|") if v.strip()]))

if conditions:
    col_serial, col_naive = st.columns(2)
    with col_serial:
        st.info("##### 事例を順に更新")
        try:
            st.dataframe(focal_summary(serial_condition(table, conditions)).drop(columns="decimal"), hide_index=True)
        except EvidenceError as exc:
            show_error(exc)
    with col_naive:
        st.warning("##### 素朴な選択 (比較用)")
        try:
            st.dataframe(
                focal_summary(naive_serial_condition(table, conditions)).drop(columns="decimal"), hide_index=True
            )
        except EvidenceError as exc:
            show_error(exc)
        st.caption("※ 各条件で事例を選ぶだけでセルを更新しないため、条件付き bpa にはなりません。")

# --- 計算根拠の表示 ---
st.markdown("---")
with st.expander("📚 計算の根拠 (クリックで展開)"):
    st.markdown("""
    * 各事例の集合値セルの直積を焦点要素とし、その件数の割合を質量とします。
    * **事例の更新**: 条件 `X ∈ A` と両立しない事例を除き、残る事例の X セルを A と交わらせてから bpa を作り直します。
    * **Shafer 条件付け**: bpa と `A` 上のカテゴリカル bpa を Dempster 則で結合します。
    * 事例からの bpa では両者は常に一致し、事例が1つも残らないときは両方とも失敗します。
    """)
