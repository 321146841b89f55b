use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activation {
    Identity,
    Relu,
    Gelu,
}

impl Activation {
    /// Value and derivative at `x`.
    #[inline]
    pub fn eval<T: Scalar>(self, x: T) -> (T, T) {
        match self {
            Activation::Identity => (x, T::one()),
            Activation::Relu => relu(x),
            Activation::Gelu => gelu(x),
        }
    }

    #[inline]
    pub fn apply<T: Scalar>(self, x: T) -> T {
        self.eval(x).0
    }

    pub fn tag(self) -> u8 {
        match self {
            Activation::Identity => 0,
            Activation::Relu => 1,
            Activation::Gelu => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Identity),
            1 => Some(Activation::Relu),
            2 => Some(Activation::Gelu),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
            Activation::Gelu => "gelu",
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "linear" => Ok(Activation::Identity),
            "relu" => Ok(Activation::Relu),
            "gelu" => Ok(Activation::Gelu),
            other => Err(format!("unknown activation `{other}`")),
        }
    }
}

/// `max(0, x)`; the derivative at 0 is taken as 0.
#[inline]
pub fn relu<T: Scalar>(x: T) -> (T, T) {
    if x > T::zero() {
        (x, T::one())
    } else {
        (T::zero(), T::zero())
    }
}

/// Tanh-approximated GeLU, `0.5 x (1 + tanh(√(2/π)(x + 0.044715 x³)))`.
#[inline]
pub fn gelu<T: Scalar>(x: T) -> (T, T) {
    let c = T::of((2.0 / std::f64::consts::PI).sqrt());
    let k = T::of(0.044715);
    let half = T::of(0.5);
    let x2 = x * x;
    let u = c * (x + k * x2 * x);
    let th = u.tanh();
    let value = half * x * (T::one() + th);
    let du = c * (T::one() + T::of(3.0) * k * x2);
    let deriv = half * (T::one() + th) + half * x * (T::one() - th * th) * du;
    (value, deriv)
}
