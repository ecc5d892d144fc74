import tensorflow as tf

inp = tf.constant([[1., 1.]])
out = tf.constant([[1., 0.]])
weight = tf.Variable([[1., 1.], [1., 1.]])

optimizer = tf.train.GradientDescentOptimizer(0.1)
y = tf.matmul(inp, weight)
loss = (out[0][0] - y[0][0])*2 + (out[0][1] - y[0][1])*2
train = optimizer.minimize(loss)

with tf.Session() as sess:
    sess.run(tf.global_variables_initializer())
    for epoch in range(1000):
        sess.run(train)
