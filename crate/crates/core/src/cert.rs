//! Witnesses that an element is a product of signed conjugates.

use crate::group::GroupAdapter;

/// One factor `conjugator⁻¹ · base^sign · conjugator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor<E> {
    pub sign: i8,
    pub conjugator: E,
}

/// `claimed_product = f_1 · f_2 · … · f_k` where each `f_i` is a signed
/// conjugate of `base`. The empty product is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjProductCert<E> {
    pub base: E,
    pub factors: Vec<Factor<E>>,
    pub claimed_product: E,
}

impl<E: Clone + Eq> ConjProductCert<E> {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Recomputes the product from scratch.
    pub fn product<G: GroupAdapter<Elem = E>>(&self, group: &G) -> E {
        let base_inv = group.invert(&self.base);
        self.factors.iter().fold(group.identity(), |acc, f| {
            let b = if f.sign >= 0 { &self.base } else { &base_inv };
            let c = group.multiply(&group.multiply(&group.invert(&f.conjugator), b), &f.conjugator);
            group.multiply(&acc, &c)
        })
    }

    pub fn replay<G: GroupAdapter<Elem = E>>(&self, group: &G) -> bool {
        self.factors.iter().all(|f| f.sign == 1 || f.sign == -1)
            && self.product(group) == self.claimed_product
    }

    pub fn to_json<G: GroupAdapter<Elem = E>>(&self, group: &G) -> serde_json::Value {
        serde_json::json!({
            "base": group.encode(&self.base),
            "factors": self.factors.iter().map(|f| serde_json::json!({
                "sign": f.sign,
                "conjugator": group.encode(&f.conjugator),
            })).collect::<Vec<_>>(),
            "claimed_product": group.encode(&self.claimed_product),
        })
    }

    pub fn from_json<G: GroupAdapter<Elem = E>>(
        group: &G,
        v: &serde_json::Value,
    ) -> crate::Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| crate::Error::Parse(format!("certificate missing {k:?}")))
        };
        let factors = field("factors")?
            .as_array()
            .ok_or_else(|| crate::Error::Parse("factors must be an array".into()))?
            .iter()
            .map(|f| {
                let sign = f.get("sign").and_then(|s| s.as_i64()).unwrap_or(0) as i8;
                let conj = f
                    .get("conjugator")
                    .ok_or_else(|| crate::Error::Parse("factor missing conjugator".into()))?;
                Ok(Factor { sign, conjugator: group.decode(conj)? })
            })
            .collect::<crate::Result<Vec<_>>>()?;
        Ok(ConjProductCert {
            base: group.decode(field("base")?)?,
            factors,
            claimed_product: group.decode(field("claimed_product")?)?,
        })
    }
}
